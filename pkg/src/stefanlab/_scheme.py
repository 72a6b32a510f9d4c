"""Shared front-fixed finite-difference machinery for plant and observer.

Both systems solve the same boundary-immobilized diffusion problem on the
normalized coordinate xi = x/extent in [0, 1]:

    u_t = (alpha/extent^2) u_xixi + (xi*rate/extent) u_xi + source(xi)

with a heat-flux (Neumann) condition at xi = 0 imposed through a ghost node,
a pinned zero at xi = 1, diffusion advanced by backward Euler, and the
convection and source terms taken explicitly.  Keeping one implementation
guarantees that the observer with zero injection gain reproduces the plant
trajectory bit for bit.
"""

import warnings

import numpy as np
from scipy.linalg.lapack import dgtsv

from .errors import NumericalError

# Safety factor on the von Neumann threshold |rate| <= sqrt(2*alpha/dt) for
# the explicit centered convection term under implicit diffusion.
_RATE_SAFETY = 0.9


def one_sided_edge_flux(theta: np.ndarray, dxi: float) -> float:
    """d(theta)/d(xi) at xi = 1 by the second-order 3-point stencil.

    Exact for quadratics; with theta[-1] pinned to zero the stencil reduces
    to (theta[-3] - 4*theta[-2]) / (2*dxi).
    """
    return (3.0 * theta[-1] - 4.0 * theta[-2] + theta[-3]) / (2.0 * dxi)


def stable_rate_cap(alpha: float, dt: float) -> float:
    """Largest convection rate the explicit term tolerates, with safety."""
    return _RATE_SAFETY * np.sqrt(2.0 * alpha / dt)


def advance_field(
    theta: np.ndarray,
    extent: float,
    rate: float,
    qc: float,
    dt: float,
    alpha: float,
    k: float,
    source: np.ndarray | None = None,
    cfl_warn: bool = True,
) -> np.ndarray:
    """One backward-Euler step of the immobilized diffusion problem.

    theta:  N+1 samples on the uniform xi-grid, theta[-1] == 0
    extent: current physical domain length (s or Y)
    rate:   domain growth rate entering the convection term; clamped to the
            explicit-stability range, identically for plant and observer
    qc:     boundary heat flux, imposed as u_xi(0) = -(qc/k)*extent
    source: optional explicit source samples (observer output injection)
    """
    n = theta.size - 1
    dxi = 1.0 / n
    mu = alpha * dt / (extent * extent * dxi * dxi)

    cap = stable_rate_cap(alpha, dt)
    if abs(rate) > cap:
        rate = cap if rate > 0.0 else -cap
    courant = dt * abs(rate) / (extent * dxi)
    if cfl_warn and courant > 0.5:
        # static message so the warnings machinery deduplicates per process
        warnings.warn(
            "explicit convection Courant number exceeds 0.5; consider reducing dt",
            RuntimeWarning,
            stacklevel=2,
        )

    # rhs: explicit convection (vanishes at xi=0, Dirichlet row at xi=1)
    rhs = theta.copy()
    xi = np.arange(1, n) * dxi
    conv = (xi * (rate / extent)) * ((theta[2:] - theta[:-2]) * (0.5 / dxi))
    rhs[1:-1] += dt * conv
    if source is not None:
        rhs[:-1] += dt * source[:-1]

    # Neumann ghost node at xi=0: theta[ghost] = theta[1] - 2*dxi*g
    g = -(qc / k) * extent
    rhs[0] += -2.0 * mu * dxi * g

    # tridiagonal system: du upper, d main, dl lower
    d = np.full(n + 1, 1.0 + 2.0 * mu)
    du = np.full(n, -mu)
    du[0] = -2.0 * mu  # ghost-node row couples twice to theta[1]
    dl = np.full(n, -mu)
    # Dirichlet row at xi = 1
    d[n] = 1.0
    dl[n - 1] = 0.0
    rhs[n] = 0.0

    _, _, _, out, info = dgtsv(
        dl, d, du, rhs, overwrite_dl=1, overwrite_d=1, overwrite_du=1, overwrite_b=1
    )
    if info != 0:
        raise NumericalError(f"tridiagonal solve failed: dgtsv info = {info}")
    if not np.all(np.isfinite(out)):
        raise NumericalError("temperature field became non-finite")
    out[n] = 0.0
    return out
