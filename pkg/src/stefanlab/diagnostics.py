"""Norms, Lyapunov functionals, constraint monitors, and decay-rate fits.

Everything here is pure post-processing on states or logged traces: the
evidence layer that turns a closed-loop run into pass/fail statements about
positivity of the heat input, monotonicity of the interface, sign and decay
of the estimation error, and decrease of the Lyapunov functionals.
"""

from dataclasses import dataclass

import numpy as np

from . import transforms
from .params import PhysicalParams, ScenarioConfig


def h1_norm_sq(f: np.ndarray, s: float, include_l2: bool = True) -> float:
    """Squared H1 norm over physical x in [0, s]:
    int f^2 dx + int f_x^2 dx (trapezoid; f_x by central differences with
    second-order one-sided edges).  include_l2=False drops the first term,
    the Poincare-equivalent seminorm variant.
    """
    f = np.asarray(f, dtype=float)
    n = f.size - 1
    dxi = 1.0 / n
    grad = np.empty_like(f)
    grad[1:-1] = (f[2:] - f[:-2]) * (0.5 * n)
    grad[0] = (-1.5 * f[0] + 2.0 * f[1] - 0.5 * f[2]) * n
    grad[-1] = (1.5 * f[-1] - 2.0 * f[-2] + 0.5 * f[-3]) * n
    g2 = grad * grad
    out = (0.5 * (g2[0] + g2[-1]) + g2[1:-1].sum()) * dxi / s
    if include_l2:
        f2 = f * f
        out += s * (0.5 * (f2[0] + f2[-1]) + f2[1:-1].sum()) * dxi
    return float(out)


def lyapunov_constants(cfg: ScenarioConfig, p: PhysicalParams) -> tuple[float, float, float, float]:
    """(p_const, a, b, d) for the closed-loop functionals:

    p_const = c*alpha/(16*beta^2*sr)
    a       = max(sr^2, 16*c*sr/alpha)
    b       = min(alpha/(8*sr^2), c, 2*lam)
    d       = max(1, a*sr)   (any fixed positive weight works for monitoring)
    """
    alpha, beta = p.alpha, p.beta
    p_const = cfg.c * alpha / (16.0 * beta**2 * cfg.sr)
    a = max(cfg.sr**2, 16.0 * cfg.c * cfg.sr / alpha)
    b = min(alpha / (8.0 * cfg.sr**2), cfg.c, 2.0 * cfg.lam)
    d = max(1.0, a * cfg.sr)
    return p_const, a, b, d


@dataclass(frozen=True)
class LyapunovSample:
    """One checkpoint of the Lyapunov diagnostics.

    V1_tilde = 0.5*||w_err||_H1^2 for the transformed estimation error;
    Vtot     = 0.5*||w_hat||_H1^2 + (p/2)*X^2 + d*V1_tilde;
    V        = Vtot * exp(-a*s).
    """

    t: float
    V1_tilde: float
    Vtot: float
    V: float


def lyapunov_sample(
    theta: np.ndarray,
    theta_hat: np.ndarray,
    s: float,
    t: float,
    cfg: ScenarioConfig,
    p: PhysicalParams,
) -> LyapunovSample:
    """Evaluate the functionals on one state snapshot via the transforms."""
    alpha, beta = p.alpha, p.beta
    p_const, a, _, d = lyapunov_constants(cfg, p)
    X = s - cfg.sr
    u_err = theta - theta_hat
    w_err = transforms.apply_inverse(u_err, s, cfg.lam, alpha)
    w_hat = transforms.controller_transform(theta_hat, X, s, cfg.c, alpha, beta)
    v1 = 0.5 * h1_norm_sq(w_err, s, include_l2=cfg.h1_l2_term)
    vtot = 0.5 * h1_norm_sq(w_hat, s, include_l2=cfg.h1_l2_term) + 0.5 * p_const * X * X + d * v1
    return LyapunovSample(t=t, V1_tilde=v1, Vtot=vtot, V=vtot * np.exp(-a * s))


@dataclass(frozen=True)
class ConstraintReport:
    """Per-step monitor flags plus the first violation time of each claim.

    epsilon is the grid tolerance C*(dxi^2 + dt) used for the field-sign
    claims (nonnegativity of u, nonpositivity of the estimation error);
    the control-sign and interface claims are strict.
    """

    qc_positive: np.ndarray
    s_increasing: np.ndarray
    s_below_sr: np.ndarray
    u_nonnegative: np.ndarray
    error_nonpositive: np.ndarray
    first_violation: dict
    epsilon: float

    @property
    def passed(self) -> bool:
        return all(v is None for v in self.first_violation.values())

    def format(self) -> str:
        lines = [f"grid tolerance epsilon = {self.epsilon:.6g}"]
        for name, tfail in self.first_violation.items():
            if tfail is None:
                lines.append(f"{name}: PASS")
            else:
                lines.append(f"{name}: FAIL (first violation at t = {tfail:.6g})")
        return "\n".join(lines)


def monitor_constraints(trace, tol_scale: float = 1.0) -> ConstraintReport:
    """Evaluate the five physical-constraint flags on a logged trace.

    Duck-typed trace: needs t, s, qc, theta_min, utilde_max arrays plus dt
    and grid_n metadata.  theta_min[i] is the minimum temperature-excess
    sample at step i, utilde_max[i] the maximum estimation-error sample.
    """
    t = np.asarray(trace.t, dtype=float)
    s = np.asarray(trace.s, dtype=float)
    qc = np.asarray(trace.qc, dtype=float)
    theta_min = np.asarray(trace.theta_min, dtype=float)
    utilde_max = np.asarray(trace.utilde_max, dtype=float)
    eps = tol_scale * ((1.0 / trace.grid_n) ** 2 + trace.dt)

    qc_positive = qc > 0.0
    s_increasing = np.empty(t.size, dtype=bool)
    s_increasing[0] = True
    s_increasing[1:] = np.diff(s) > 0.0
    s_below_sr = s < trace.sr
    u_nonnegative = theta_min >= -eps
    error_nonpositive = utilde_max <= eps

    flags = {
        "qc_positive": qc_positive,
        "s_increasing": s_increasing,
        "s_below_sr": s_below_sr,
        "u_nonnegative": u_nonnegative,
        "error_nonpositive": error_nonpositive,
    }
    first = {}
    for name, ok in flags.items():
        bad = np.nonzero(~ok)[0]
        first[name] = None if bad.size == 0 else float(t[bad[0]])

    return ConstraintReport(
        qc_positive=qc_positive,
        s_increasing=s_increasing,
        s_below_sr=s_below_sr,
        u_nonnegative=u_nonnegative,
        error_nonpositive=error_nonpositive,
        first_violation=first,
        epsilon=eps,
    )


def fit_decay_rate(t, values) -> float:
    """Exponential decay rate fitted on the final half of a positive series.

    Least-squares slope of log(values) against t over the last half of the
    samples, negated, so e^{-3t} yields 3.0.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if t.size < 10:
        raise ValueError("need at least 10 samples to fit a rate")
    if np.any(values <= 0.0):
        raise ValueError("all samples must be strictly positive")
    half = t.size // 2
    tt, vv = t[half:], np.log(values[half:])
    slope = np.polyfit(tt, vv, 1)[0]
    return float(-slope)
