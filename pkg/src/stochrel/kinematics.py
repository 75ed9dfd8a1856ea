"""Closed-form single-particle relativistic kinematics under the random force.

The lab-frame velocity as a function of proper time is

    v(tau) = c * tanh(theta(tau)),
    theta(tau) = (A(tau) + c_hat) / (m0 * c),

where A is the zero-period-mean antiderivative of the proper-frame force.
Because A averages to zero over a fundamental period, the integration
constant ``c_hat`` fixes the drift rapidity: the period-averaged rapidity is
exactly c_hat/(m0*c) for every realization, while the rapidity at tau = 0
carries a realization-dependent offset A(0)/(m0*c).

Lab time follows from dt/dtau = gamma = cosh(theta) by quadrature; the
inverse map exploits monotonicity (gamma >= 1) for bracketing plus Newton
refinement with the analytic derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import noise
from .errors import NumericalError
from .noise import NoiseSpec, Realization
from .quadrature import adaptive_simpson, cumulative_simpson, cumulative_simpson_uniform

__all__ = [
    "ParticleModel",
    "KinematicSeries",
    "rapidity_at",
    "velocity_at_proper_time",
    "lorentz_factor_at",
    "lab_time_of",
    "lab_time_grid",
    "proper_time_of",
    "trajectory",
    "proper_to_lab_force",
    "lab_to_proper_force",
]


@dataclass(frozen=True)
class ParticleModel:
    """Everything needed to evaluate one particle's closed-form motion.

    ``c_hat`` is the integration constant in momentum-impulse units (N s);
    c_hat/(m0*c) is the drift rapidity of the trajectory.
    """

    m0: float
    c: float
    c_hat: float
    noise: NoiseSpec
    realization: Realization

    def __post_init__(self):
        if not self.m0 > 0:
            raise ValueError(f"rest mass must be positive, got {self.m0}")
        if not self.c > 0:
            raise ValueError(f"light speed must be positive, got {self.c}")
        if not math.isfinite(self.c_hat / (self.m0 * self.c)):
            raise ValueError("drift rapidity c_hat/(m0*c) must be finite")

    @property
    def drift_rapidity(self) -> float:
        return self.c_hat / (self.m0 * self.c)


@dataclass(frozen=True)
class KinematicSeries:
    """Aligned samples (tau, t, x, v) of one trajectory."""

    tau: np.ndarray
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    c: float

    def __post_init__(self):
        arrays = {}
        for name in ("tau", "t", "x", "v"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            arrays[name] = arr
        n = arrays["tau"].size
        if any(a.ndim != 1 or a.size != n for a in arrays.values()):
            raise ValueError("tau, t, x, v must be 1-D arrays of equal length")
        if n == 0:
            return
        if np.any(np.diff(arrays["tau"]) <= 0) or np.any(np.diff(arrays["t"]) <= 0):
            raise ValueError("tau and t must be strictly increasing")
        if np.any(np.abs(arrays["v"]) >= self.c):
            raise ValueError("velocities must be strictly inside (-c, c)")
        slack = 1e-9 * np.maximum(1.0, np.abs(arrays["tau"]))
        if np.any(arrays["t"] < arrays["tau"] - slack):
            raise ValueError("lab time must not run slower than proper time (gamma >= 1)")

    def __len__(self):
        return self.tau.size


def rapidity_at(model: ParticleModel, tau):
    """Rapidity theta(tau) = (A(tau) + c_hat)/(m0*c).

    A is the zero-period-mean antiderivative of the force, so the period
    average of the rapidity equals the model's drift rapidity exactly.
    Shifting c_hat by delta shifts the rapidity by delta/(m0*c) at every tau.
    """
    a = noise.force_antiderivative(model.noise, model.realization, tau)
    return (a + model.c_hat) / (model.m0 * model.c)


def velocity_at_proper_time(model: ParticleModel, tau):
    """Lab-frame velocity c*tanh(theta(tau)), strictly inside (-c, c)."""
    return model.c * np.tanh(rapidity_at(model, tau))


def lorentz_factor_at(model: ParticleModel, tau):
    """gamma(tau) = cosh(theta(tau)) = dt/dtau along the trajectory."""
    return np.cosh(rapidity_at(model, tau))


def _min_component_period(spec: NoiseSpec) -> float:
    """Period of the highest comb frequency; sets the quadrature mesh scale."""
    return 2.0 * math.pi / spec.bandwidth


def _initial_panels(model: ParticleModel, span: float) -> int:
    return max(8, int(math.ceil(8.0 * span / _min_component_period(model.noise))))


def lab_time_of(model: ParticleModel, tau: float, tol: float = 1e-8) -> float:
    """Lab time elapsed while proper time runs from 0 to ``tau``.

    Adaptive quadrature of gamma over [0, tau] with relative error <= tol.
    The result is >= tau; t(0) = 0.  Raises NumericalError (carrying the
    achieved error estimate) if the quadrature does not converge.
    """
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if tau == 0.0:
        return 0.0

    def gamma(ts):
        return np.cosh(rapidity_at(model, ts))

    value, _ = adaptive_simpson(gamma, 0.0, float(tau), rtol=tol, initial_panels=_initial_panels(model, tau))
    return max(value, float(tau))


def lab_time_grid(model: ParticleModel, tau_grid, tol: float = 1e-8) -> np.ndarray:
    """Lab times at every point of an increasing proper-time grid.

    tau_grid[0] may be 0; the result starts at lab_time_of(tau_grid[0]).
    One cumulative pass, so much cheaper than repeated ``lab_time_of`` calls.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)

    def gamma(ts):
        return np.cosh(rapidity_at(model, ts))

    base = lab_time_of(model, float(tau_grid[0]), tol) if tau_grid[0] > 0 else 0.0
    rel = cumulative_simpson(gamma, tau_grid, sub_panels=_grid_sub_panels(model, tau_grid), rtol=tol)
    return base + rel


def _grid_sub_panels(model: ParticleModel, grid: np.ndarray) -> int:
    max_step = float(np.max(np.diff(grid)))
    return max(1, int(math.ceil(4.0 * max_step / _min_component_period(model.noise))))


def proper_time_of(model: ParticleModel, t: float, tol: float = 1e-8) -> float:
    """Invert the tau -> t map: proper time elapsed at lab time ``t``.

    Since gamma >= 1, tau <= t always brackets the root; the walk advances in
    sub-period chunks and the final chunk is solved by safeguarded Newton
    with the analytic derivative gamma(tau).  |lab_time_of(result) - t| is
    kept within tol * max(1, t).
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if t == 0.0:
        return 0.0

    def gamma_scalar(tau):
        return float(np.cosh(rapidity_at(model, float(tau))))

    def gamma(ts):
        return np.cosh(rapidity_at(model, ts))

    tol_abs = tol * max(1.0, t)
    chunk = min(0.25 * noise.fundamental_period(model.noise), float(t))
    panels = _initial_panels(model, chunk)

    t_acc = 0.0
    tau_a = 0.0
    while True:
        tau_b = min(tau_a + chunk, float(t))
        part, _ = adaptive_simpson(gamma, tau_a, tau_b, rtol=tol / 8.0, atol=tol_abs / 8.0, initial_panels=panels)
        if t_acc + part >= t or tau_b >= t:
            break
        t_acc += part
        tau_a = tau_b

    # solve t_acc + integral(tau_a .. tau) = t inside [tau_a, tau_b]
    lo, hi = tau_a, tau_b
    tau = tau_a + (t - t_acc) / gamma_scalar(tau_a)
    tau = min(max(tau, lo), hi)
    for _ in range(100):
        part, _ = adaptive_simpson(
            gamma, tau_a, tau, rtol=tol / 8.0, atol=tol_abs / 8.0, initial_panels=max(4, panels // 2)
        )
        g = t_acc + part - t
        if abs(g) <= tol_abs:
            return tau
        if g > 0:
            hi = tau
        else:
            lo = tau
        step = tau - g / gamma_scalar(tau)
        tau = step if lo < step < hi else 0.5 * (lo + hi)
    raise NumericalError(
        f"inversion of the lab-time map did not converge at t={t!r}", error_estimate=abs(g)
    )


def trajectory(
    model: ParticleModel,
    t_end: float,
    n_steps: int,
    x0: float = 0.0,
    tol: float = 1e-8,
) -> KinematicSeries:
    """Sample the trajectory on a uniform lab-time grid.

    Proper times come from one monotone inversion sweep of the tau -> t map
    (equivalent to composing with ``proper_time_of`` point by point, but a
    single pass); positions integrate v dt by the trapezoidal rule with
    x(0) = x0, so the position error is O(dt^2) and dominated by sampling.
    """
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if n_steps < 2:
        raise ValueError(f"n_steps must be >= 2, got {n_steps}")

    t_grid = np.linspace(0.0, float(t_end), int(n_steps))
    tau_grid = _invert_lab_times(model, t_grid, tol)
    v = velocity_at_proper_time(model, tau_grid)
    dx = 0.5 * (v[1:] + v[:-1]) * np.diff(t_grid)
    x = np.empty_like(t_grid)
    x[0] = x0
    np.cumsum(dx, out=x[1:])
    x[1:] += x0
    return KinematicSeries(tau=tau_grid, t=t_grid, x=x, v=v, c=model.c)


def _invert_lab_times(model: ParticleModel, t_targets: np.ndarray, tol: float) -> np.ndarray:
    """Proper times for an increasing array of lab-time targets (t[0] = 0).

    Walks forward over blocks of proper time; inside a block the fine
    (tau_j, t_j, gamma_j) mesh from cumulative Simpson is inverted by cubic
    Hermite interpolation of tau(t), whose slope 1/gamma is known exactly at
    the nodes.
    """
    def gamma(ts):
        return np.cosh(rapidity_at(model, ts))

    t_max = float(t_targets[-1])
    h = _min_component_period(model.noise) / 8.0
    # tau never exceeds t (gamma >= 1), so blocks past t_max are wasted work
    block = min(1024 * h, t_max + h)
    n_int = max(16, int(math.ceil(block / h)))

    out = np.empty(t_targets.size)
    out[0] = 0.0
    next_idx = 1
    tau_a = 0.0
    t_acc = 0.0
    while next_idx < t_targets.size:
        rel, g_fine = cumulative_simpson_uniform(gamma, tau_a, tau_a + block, n_int, rtol=tol / 4.0)
        fine = np.linspace(tau_a, tau_a + block, n_int + 1)
        t_fine = t_acc + rel

        hi = int(np.searchsorted(t_targets, t_fine[-1], side="right"))
        sel = slice(next_idx, hi)
        if hi > next_idx:
            out[sel] = _hermite_inverse(t_targets[sel], fine, t_fine, g_fine)
            next_idx = hi
        tau_a = float(fine[-1])
        t_acc = float(t_fine[-1])
        if t_acc >= t_max and next_idx >= t_targets.size:
            break
    return out


def _hermite_inverse(t_query, tau_nodes, t_nodes, gamma_nodes):
    """Cubic Hermite interpolation of tau(t) given nodes and dtau/dt = 1/gamma."""
    idx = np.clip(np.searchsorted(t_nodes, t_query, side="right") - 1, 0, t_nodes.size - 2)
    t0, t1 = t_nodes[idx], t_nodes[idx + 1]
    dt = t1 - t0
    s = (t_query - t0) / dt
    m0 = dt / gamma_nodes[idx]
    m1 = dt / gamma_nodes[idx + 1]
    s2, s3 = s * s, s * s * s
    return (
        (2 * s3 - 3 * s2 + 1) * tau_nodes[idx]
        + (s3 - 2 * s2 + s) * m0
        + (-2 * s3 + 3 * s2) * tau_nodes[idx + 1]
        + (s3 - s2) * m1
    )


def proper_to_lab_force(f_proper, v, c):
    """Lab-frame force from the proper-frame one: f_proper / sqrt(1 - v^2/c^2)."""
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(v) >= c):
        raise ValueError("|v| must be strictly less than c")
    out = np.asarray(f_proper, dtype=float) / np.sqrt(1.0 - (v / c) ** 2)
    return float(out) if out.ndim == 0 else out


def lab_to_proper_force(f_lab, v, c):
    """Proper-frame force from the lab one: sqrt(1 - v^2/c^2) * f_lab."""
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(v) >= c):
        raise ValueError("|v| must be strictly less than c")
    out = np.asarray(f_lab, dtype=float) * np.sqrt(1.0 - (v / c) ** 2)
    return float(out) if out.ndim == 0 else out
