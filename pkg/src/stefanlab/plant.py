"""The true one-phase Stefan system on the moving domain [0, s(t)].

State is the temperature excess u = T - Tm sampled on a uniform normalized
grid xi_i = i/N over [0, s(t)], plus the interface position s(t).  The
interface obeys the local energy balance s' = -beta * u_x(s, t); the heat
flux qc enters at x = 0.
"""

from dataclasses import dataclass

import numpy as np

from ._scheme import advance_field, one_sided_edge_flux
from .errors import BlowUpError
from .params import PhysicalParams, ScenarioConfig


@dataclass(frozen=True)
class PlantState:
    """t: time (s); s: interface position (m); theta: u samples on the xi-grid.

    s_prev holds the interface position one step earlier, so the next step's
    explicit convection term can use the backward-difference rate
    (s - s_prev)/dt -- the same expression the observer forms from its
    measurements.  None marks the initial state, where the rate comes from
    the initial profile's interface flux instead.
    """

    t: float
    s: float
    theta: np.ndarray
    s_prev: float | None = None


def init_plant(cfg: ScenarioConfig) -> PlantState:
    """Initial state: s = s0 and the linear profile u = H*(s0 - x)."""
    xi = np.linspace(0.0, 1.0, cfg.grid_n + 1)
    theta = cfg.H * cfg.s0 * (1.0 - xi)
    theta[-1] = 0.0
    return PlantState(t=0.0, s=cfg.s0, theta=theta)


def interface_flux(st: PlantState) -> float:
    """u_x at x = s(t), one-sided second-order difference scaled by 1/s."""
    dxi = 1.0 / (st.theta.size - 1)
    return one_sided_edge_flux(st.theta, dxi) / st.s


def step_plant(
    st: PlantState,
    qc: float,
    dt: float,
    p: PhysicalParams,
    domain_cap: float | None = None,
) -> PlantState:
    """Advance one step: implicit diffusion, explicit convection with the
    previous step's interface rate, then the Stefan update
    s+ = s + dt * (-beta) * u_x(s) with the flux evaluated on the new field.

    Assumes a fixed dt across steps (the backward-difference rate divides by
    the current dt).  Raises BlowUpError if the interface collapses or
    reaches 95% of the domain cap.
    """
    alpha, beta = p.alpha, p.beta
    if st.s_prev is None:
        rate = -beta * interface_flux(st)
    else:
        rate = (st.s - st.s_prev) / dt

    theta_new = advance_field(st.theta, st.s, rate, qc, dt, alpha, p.k)

    dxi = 1.0 / (st.theta.size - 1)
    flux_new = one_sided_edge_flux(theta_new, dxi) / st.s
    s_new = st.s + dt * (-beta * flux_new)

    if s_new <= 0.0:
        raise BlowUpError(f"interface collapsed: s = {s_new:.6g} at t = {st.t + dt:.6g}")
    if domain_cap is not None and s_new >= 0.95 * domain_cap:
        raise BlowUpError(
            f"interface reached the domain cap: s = {s_new:.6g} at t = {st.t + dt:.6g}"
        )

    return PlantState(t=st.t + dt, s=s_new, theta=theta_new, s_prev=st.s)
