"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A parameter or config file violates a structural requirement."""


class BlowUpError(RuntimeError):
    """The simulated interface left its admissible range (s <= 0 or s at the domain cap)."""


class NumericalError(RuntimeError):
    """A linear solve failed or the temperature field became non-finite."""
