"""Closed-loop engine: measurement, feedback, and joint plant/observer stepping.

Loop ordering, fixed and relied upon by the equivalence checks: at each step
the interface is measured, the observer's extent is rescaled to that
measurement (assimilation; a no-op on the normalized samples), the controller
is evaluated on the assimilated observer state (or the true state in
state-feedback mode), and then plant and observer advance over the same
interval with the same heat flux and the same start-of-interval extent.
Because both systems share one discrete operator, a zero-gain observer
started on the true profile reproduces the plant bit for bit, and the two
feedback laws then produce identical traces.
"""

from dataclasses import dataclass, field

import numpy as np

from . import control, diagnostics, transforms
from .errors import BlowUpError, NumericalError
from .observer import estimate_flux, init_observer, step_observer
from .params import PhysicalParams, ScenarioConfig
from .plant import init_plant, interface_flux, step_plant

TRACE_COLUMNS = (
    "t",
    "s",
    "qc",
    "T0",
    "That0",
    "Ttilde0",
    "h1_u",
    "h1_err",
    "energy",
    "V",
    "Vtot",
    "utilde_x_s",
    "theta_min",
    "utilde_max",
    "qc_positive",
    "s_increasing",
    "s_below_sr",
    "u_nonnegative",
    "error_nonpositive",
)

CHECKPOINT_COLUMNS = (
    "t",
    "s",
    "X",
    "V1_tilde",
    "Vtot",
    "V",
    "wtilde_max",
    "utilde_sup",
    "rt_error_pair_abs",
    "what_sup",
    "rt_ctrl_abs",
    "what_boundary",
)


@dataclass
class Trace:
    """Column-oriented log of a run; V and Vtot are NaN off checkpoints."""

    t: np.ndarray
    s: np.ndarray
    qc: np.ndarray
    T0: np.ndarray
    That0: np.ndarray
    Ttilde0: np.ndarray
    h1_u: np.ndarray
    h1_err: np.ndarray
    energy: np.ndarray
    V: np.ndarray
    Vtot: np.ndarray
    utilde_x_s: np.ndarray
    theta_min: np.ndarray
    utilde_max: np.ndarray
    dt: float
    grid_n: int
    sr: float
    mode: str

    def columns(self) -> dict:
        """Column name -> array, flags included, in CSV order."""
        report = diagnostics.monitor_constraints(self)
        out = {}
        for name in TRACE_COLUMNS:
            if hasattr(self, name):
                out[name] = getattr(self, name)
            else:
                out[name] = getattr(report, name).astype(int)
        return out


@dataclass
class SimulationResult:
    trace: Trace
    checkpoints: dict
    completed: bool
    failure: str | None = None
    final_plant: object = None
    final_observer: object = None
    constants: tuple = field(default=())


def _checkpoint_row(st, ob, y, t, cfg, p):
    alpha, beta = p.alpha, p.beta
    X = y - cfg.sr
    u_err = st.theta - ob.theta_hat
    w_err = transforms.apply_inverse(u_err, y, cfg.lam, alpha)
    rt_err = transforms.apply_direct(w_err, y, cfg.lam, alpha) - u_err
    w_hat = transforms.controller_transform(ob.theta_hat, X, y, cfg.c, alpha, beta)
    rt_ctrl = (
        transforms.controller_inverse(w_hat, X, y, cfg.c, alpha, beta) - ob.theta_hat
    )
    sample = diagnostics.lyapunov_sample(st.theta, ob.theta_hat, y, t, cfg, p)
    return {
        "t": t,
        "s": y,
        "X": X,
        "V1_tilde": sample.V1_tilde,
        "Vtot": sample.Vtot,
        "V": sample.V,
        "wtilde_max": float(np.max(w_err)),
        "utilde_sup": float(np.max(np.abs(u_err))),
        "rt_error_pair_abs": float(np.max(np.abs(rt_err))),
        "what_sup": float(np.max(np.abs(w_hat))),
        "rt_ctrl_abs": float(np.max(np.abs(rt_ctrl))),
        "what_boundary": float(abs(w_hat[-1])),
    }, sample


def simulate(cfg: ScenarioConfig, p: PhysicalParams) -> SimulationResult:
    """Run the closed loop over the configured horizon.

    Numerical failures do not raise: the result carries the truncated trace
    with completed=False and the failure message.
    """
    n_steps = int(round(cfg.t_end / cfg.dt))
    if n_steps < 1:
        raise ValueError("horizon shorter than one step")
    domain_cap = cfg.domain_cap if cfg.domain_cap is not None else 2.0 * cfg.sr

    st = init_plant(cfg)
    ob = init_observer(cfg)

    n_rows = n_steps + 1
    cols = {
        name: np.empty(n_rows)
        for name in (
            "t",
            "s",
            "qc",
            "T0",
            "That0",
            "Ttilde0",
            "h1_u",
            "h1_err",
            "energy",
            "V",
            "Vtot",
            "utilde_x_s",
            "theta_min",
            "utilde_max",
        )
    }
    cols["V"].fill(np.nan)
    cols["Vtot"].fill(np.nan)
    checkpoint_rows = []

    completed = True
    failure = None
    rows = 0
    for i in range(n_rows):
        y = st.s  # measurement; the observer extent is rescaled to it
        t = i * cfg.dt

        if cfg.mode == "state_feedback":
            out = control.state_feedback(st, cfg, p)
        else:
            out = control.output_feedback(ob, y, cfg, p)

        u_err = st.theta - ob.theta_hat
        cols["t"][i] = t
        cols["s"][i] = y
        cols["qc"][i] = out.qc
        cols["T0"][i] = p.tm + st.theta[0]
        cols["That0"][i] = p.tm + ob.theta_hat[0]
        cols["Ttilde0"][i] = st.theta[0] - ob.theta_hat[0]
        cols["h1_u"][i] = diagnostics.h1_norm_sq(st.theta, y, cfg.h1_l2_term)
        cols["h1_err"][i] = diagnostics.h1_norm_sq(u_err, y, cfg.h1_l2_term)
        cols["energy"][i] = control.internal_energy(st, p)
        cols["utilde_x_s"][i] = interface_flux(st) - estimate_flux(ob, y)
        cols["theta_min"][i] = float(np.min(st.theta))
        cols["utilde_max"][i] = float(np.max(u_err))

        if i % cfg.checkpoint_every == 0 or i == n_rows - 1:
            row, sample = _checkpoint_row(st, ob, y, t, cfg, p)
            checkpoint_rows.append(row)
            cols["V"][i] = sample.V
            cols["Vtot"][i] = sample.Vtot

        rows = i + 1
        if i == n_rows - 1:
            break

        try:
            st_next = step_plant(st, out.qc, cfg.dt, p, domain_cap=domain_cap)
            ob_next = step_observer(ob, y, out.qc, cfg.dt, cfg, p)
        except (BlowUpError, NumericalError) as exc:
            completed = False
            failure = str(exc)
            break
        st, ob = st_next, ob_next

    trace = Trace(
        **{name: arr[:rows] for name, arr in cols.items()},
        dt=cfg.dt,
        grid_n=cfg.grid_n,
        sr=cfg.sr,
        mode=cfg.mode,
    )
    checkpoints = {
        name: np.array([r[name] for r in checkpoint_rows]) for name in CHECKPOINT_COLUMNS
    }
    return SimulationResult(
        trace=trace,
        checkpoints=checkpoints,
        completed=completed,
        failure=failure,
        final_plant=st,
        final_observer=ob,
        constants=diagnostics.lyapunov_constants(cfg, p),
    )
