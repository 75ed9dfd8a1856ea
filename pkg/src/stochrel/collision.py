"""Two particles in the medium repelling through a non-retarded Coulomb force.

Each particle is driven by its own proper-frame random force evaluated at its
own proper time; the mutual repulsion acts in the lab frame at equal lab time
(retardation disregarded).  The coupled first-order system in lab time is

    dx_k/dt   = v_k
    dv_k/dt   = (1 - v_k^2/c^2)^(3/2) / m0 * [F_k(tau_k) + sqrt(1 - v_k^2/c^2) * F_rep,k]
    dtau_k/dt = sqrt(1 - v_k^2/c^2)

integrated by classical fixed-step RK4.  A step that drives any |v| to c or
the separation below the configured minimum is rejected and retried at half
the step, down to a floor of dt/2^10, after which a SingularityError reports
the time and separation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ProximityError, SingularityError
from .kinematics import KinematicSeries, ParticleModel
from .noise import NoiseSpec, Realization
from .stats import DriftSummary, drift_summary

__all__ = [
    "TwoParticleState",
    "TwoParticleConfig",
    "TwoParticleSeries",
    "ShockReport",
    "config_from_drift",
    "coulomb_pair_force",
    "derivative",
    "integrate_shock",
    "shock_report",
]

_STEP_HALVINGS = 10


@dataclass(frozen=True)
class TwoParticleState:
    """Positions, lab velocities and proper times of the pair."""

    x1: float
    v1: float
    tau1: float
    x2: float
    v2: float
    tau2: float


@dataclass(frozen=True)
class TwoParticleConfig:
    """Coupling, common particle constants, per-particle forcing and start state.

    ``c_hat1``/``c_hat2`` record the drift constants used to derive the
    initial velocities (see :func:`config_from_drift`); the integrator itself
    never reads them, they exist so reports and oracles can rebuild the
    matching single-particle models.
    """

    alpha: float
    m0: float
    c: float
    noise1: NoiseSpec
    real1: Realization
    noise2: NoiseSpec
    real2: Realization
    initial: TwoParticleState
    t0: float = 0.0
    min_separation: float = 1e-4
    c_hat1: float = 0.0
    c_hat2: float = 0.0

    def __post_init__(self):
        if self.alpha < 0:
            raise ConfigurationError(f"coupling must be repulsive (alpha >= 0), got {self.alpha}")
        if not self.m0 > 0 or not self.c > 0:
            raise ConfigurationError("m0 and c must be positive")
        if not self.min_separation > 0:
            raise ConfigurationError(f"min_separation must be positive, got {self.min_separation}")
        s = self.initial
        if abs(s.v1) >= self.c or abs(s.v2) >= self.c:
            raise ConfigurationError("initial velocities must satisfy |v| < c")
        if self.alpha > 0 and abs(s.x1 - s.x2) < self.min_separation:
            raise ConfigurationError(
                f"initial separation {abs(s.x1 - s.x2):g} m is below min_separation "
                f"{self.min_separation:g} m"
            )

    def particle_models(self) -> tuple[ParticleModel, ParticleModel]:
        """Single-particle models matching the recorded drift constants."""
        return (
            ParticleModel(self.m0, self.c, self.c_hat1, self.noise1, self.real1),
            ParticleModel(self.m0, self.c, self.c_hat2, self.noise2, self.real2),
        )


def config_from_drift(
    *,
    alpha: float,
    m0: float,
    c: float,
    noise1: NoiseSpec,
    real1: Realization,
    noise2: NoiseSpec,
    real2: Realization,
    drift_v1: float,
    drift_v2: float,
    x1_0: float,
    x2_0: float,
    t0: float = 0.0,
    min_separation: float = 1e-4,
) -> TwoParticleConfig:
    """Build a config whose free-motion drift velocities equal the given ones.

    The drift constants are c_hat_k = m0*c*atanh(v_k/c) and the initial
    velocities are the closed-form single-particle velocities at tau = 0,
    which carry the realization-dependent offset of the force antiderivative.
    """
    from . import kinematics

    if abs(drift_v1) >= c or abs(drift_v2) >= c:
        raise ConfigurationError("drift velocities must satisfy |v| < c")
    c_hat1 = m0 * c * math.atanh(drift_v1 / c)
    c_hat2 = m0 * c * math.atanh(drift_v2 / c)
    m1 = ParticleModel(m0, c, c_hat1, noise1, real1)
    m2 = ParticleModel(m0, c, c_hat2, noise2, real2)
    initial = TwoParticleState(
        x1=x1_0,
        v1=float(kinematics.velocity_at_proper_time(m1, 0.0)),
        tau1=0.0,
        x2=x2_0,
        v2=float(kinematics.velocity_at_proper_time(m2, 0.0)),
        tau2=0.0,
    )
    return TwoParticleConfig(
        alpha=alpha,
        m0=m0,
        c=c,
        noise1=noise1,
        real1=real1,
        noise2=noise2,
        real2=real2,
        initial=initial,
        t0=t0,
        min_separation=min_separation,
        c_hat1=c_hat1,
        c_hat2=c_hat2,
    )


def coulomb_pair_force(x1: float, x2: float, alpha: float, min_separation: float = 0.0):
    """Repulsive inverse-square pair forces (force on 1, force on 2).

    The force on particle 1 is alpha * sign(x1 - x2) / (x1 - x2)^2; the force
    on particle 2 is its exact negative.  Raises ProximityError when the
    separation is below ``min_separation`` (or exactly zero).
    """
    dx = x1 - x2
    sep = abs(dx)
    if sep < min_separation or sep == 0.0:
        raise ProximityError(
            f"separation {sep:g} m fell below the minimum {min_separation:g} m",
            separation=sep,
        )
    f1 = alpha / (dx * dx)
    if dx < 0:
        f1 = -f1
    return f1, -f1


class _Reject(Exception):
    """Internal: an RK4 stage left the admissible state region."""


class _Dynamics:
    """Scalar right-hand side with preallocated buffers for the force combs."""

    def __init__(self, config: TwoParticleConfig):
        self.c2 = config.c * config.c
        self.inv_m0 = 1.0 / config.m0
        self.alpha = config.alpha
        self.min_sep = config.min_separation
        self.w1 = config.noise1.frequencies
        self.p1 = config.real1.phases
        self.a1 = config.noise1.f0 / config.noise1.n_components
        self.w2 = config.noise2.frequencies
        self.p2 = config.real2.phases
        self.a2 = config.noise2.f0 / config.noise2.n_components
        self._b1 = np.empty_like(self.w1)
        self._b2 = np.empty_like(self.w2)

    def force1(self, tau: float) -> float:
        b = self._b1
        np.multiply(self.w1, tau, out=b)
        b += self.p1
        np.cos(b, out=b)
        return self.a1 * float(b.sum())

    def force2(self, tau: float) -> float:
        b = self._b2
        np.multiply(self.w2, tau, out=b)
        b += self.p2
        np.cos(b, out=b)
        return self.a2 * float(b.sum())

    def rhs(self, x1, v1, tau1, x2, v2, tau2):
        one_m1 = 1.0 - v1 * v1 / self.c2
        one_m2 = 1.0 - v2 * v2 / self.c2
        if one_m1 <= 0.0 or one_m2 <= 0.0:
            raise _Reject
        root1 = math.sqrt(one_m1)
        root2 = math.sqrt(one_m2)
        if self.alpha != 0.0:
            fr1, fr2 = coulomb_pair_force(x1, x2, self.alpha, self.min_sep)
        else:
            fr1 = fr2 = 0.0
        dv1 = one_m1 * root1 * self.inv_m0 * (self.force1(tau1) + root1 * fr1)
        dv2 = one_m2 * root2 * self.inv_m0 * (self.force2(tau2) + root2 * fr2)
        return v1, dv1, root1, v2, dv2, root2


def derivative(state: TwoParticleState, config: TwoParticleConfig):
    """Lab-time derivative of the 6-component state.

    Returns d/dt (x1, v1, tau1, x2, v2, tau2).  Raises ProximityError if the
    separation is below the configured minimum.
    """
    if abs(state.v1) >= config.c or abs(state.v2) >= config.c:
        raise ValueError("state velocities must satisfy |v| < c")
    dyn = _Dynamics(config)
    return dyn.rhs(state.x1, state.v1, state.tau1, state.x2, state.v2, state.tau2)


@dataclass(frozen=True)
class TwoParticleSeries:
    """Accepted integration steps of one shock run."""

    t: np.ndarray
    x1: np.ndarray
    v1: np.ndarray
    tau1: np.ndarray
    x2: np.ndarray
    v2: np.ndarray
    tau2: np.ndarray
    c: float

    def __post_init__(self):
        for name in ("t", "x1", "v1", "tau1", "x2", "v2", "tau2"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("lab times must be strictly increasing")
        if np.any(np.abs(self.v1) >= self.c) or np.any(np.abs(self.v2) >= self.c):
            raise ValueError("velocities must stay strictly inside (-c, c)")
        if np.any(np.diff(self.tau1) <= 0) or np.any(np.diff(self.tau2) <= 0):
            raise ValueError("proper times must strictly increase")

    def __len__(self):
        return self.t.size

    @property
    def separation(self) -> np.ndarray:
        return np.abs(self.x1 - self.x2)

    def state(self, i: int) -> TwoParticleState:
        return TwoParticleState(
            x1=float(self.x1[i]),
            v1=float(self.v1[i]),
            tau1=float(self.tau1[i]),
            x2=float(self.x2[i]),
            v2=float(self.v2[i]),
            tau2=float(self.tau2[i]),
        )


def integrate_shock(config: TwoParticleConfig, t_end: float, dt: float) -> TwoParticleSeries:
    """Integrate the pair from config.t0 to t_end with nominal step dt.

    Classical RK4; every accepted step is recorded.  Steps are halved on
    rejection (|v| >= c or separation below the minimum, at a stage or at the
    step end) down to dt/2^10, then a SingularityError is raised.
    """
    if not dt > 0:
        raise ConfigurationError(f"dt must be positive, got {dt}")
    if not t_end > config.t0:
        raise ConfigurationError(f"t_end ({t_end}) must exceed t0 ({config.t0})")

    dyn = _Dynamics(config)
    c = config.c
    min_sep = config.min_separation
    floor = dt / 2**_STEP_HALVINGS

    s = config.initial
    y = (s.x1, s.v1, s.tau1, s.x2, s.v2, s.tau2)
    t = float(config.t0)
    cols = [[y[i]] for i in range(6)]
    times = [t]

    sixth = 1.0 / 6.0
    while t < t_end - 1e-12 * max(1.0, abs(t_end)):
        h = min(dt, t_end - t)
        while True:
            try:
                k1 = dyn.rhs(*y)
                y2 = tuple(y[i] + 0.5 * h * k1[i] for i in range(6))
                k2 = dyn.rhs(*y2)
                y3 = tuple(y[i] + 0.5 * h * k2[i] for i in range(6))
                k3 = dyn.rhs(*y3)
                y4 = tuple(y[i] + h * k3[i] for i in range(6))
                k4 = dyn.rhs(*y4)
                y_new = tuple(
                    y[i] + h * sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) for i in range(6)
                )
                ok = (
                    abs(y_new[1]) < c
                    and abs(y_new[4]) < c
                    and (config.alpha == 0.0 or abs(y_new[0] - y_new[3]) >= min_sep)
                )
            except (ProximityError, _Reject):
                ok = False
            if ok:
                break
            h *= 0.5
            if h < floor * (1.0 - 1e-12):
                sep = abs(y[0] - y[3])
                raise SingularityError(
                    f"step floor dt/2^{_STEP_HALVINGS} exhausted at t={t:g} s "
                    f"(separation {sep:g} m)",
                    time=t,
                    separation=sep,
                )
        t += h
        y = y_new
        times.append(t)
        for i in range(6):
            cols[i].append(y[i])

    return TwoParticleSeries(
        t=np.array(times),
        x1=np.array(cols[0]),
        v1=np.array(cols[1]),
        tau1=np.array(cols[2]),
        x2=np.array(cols[3]),
        v2=np.array(cols[4]),
        tau2=np.array(cols[5]),
        c=c,
    )


@dataclass(frozen=True)
class ShockReport:
    """Per-particle drift summaries on both sides of the closest approach."""

    before: tuple[DriftSummary, DriftSummary]
    after: tuple[DriftSummary, DriftSummary]
    total_momentum_before: float
    total_momentum_after: float
    closest_approach: float
    t_closest: float


def shock_report(
    series: TwoParticleSeries,
    config: TwoParticleConfig,
    pre_window: tuple[float, float],
    post_window: tuple[float, float],
) -> ShockReport:
    """Summarize drift quantities before and after the encounter.

    Both windows must lie inside the series span, on opposite sides of the
    closest-approach time, and must not contain it.
    """
    sep = series.separation
    i_min = int(np.argmin(sep))
    t_closest = float(series.t[i_min])
    closest = float(sep[i_min])

    pre = (float(pre_window[0]), float(pre_window[1]))
    post = (float(post_window[0]), float(post_window[1]))
    span = (float(series.t[0]), float(series.t[-1]))
    for name, win in (("pre", pre), ("post", post)):
        if not (span[0] <= win[0] < win[1] <= span[1]):
            raise ConfigurationError(f"{name} window {win} outside the series span {span}")
    if pre[1] >= t_closest:
        raise ConfigurationError(
            f"pre window {pre} must end before the closest approach at t={t_closest:g}"
        )
    if post[0] <= t_closest:
        raise ConfigurationError(
            f"post window {post} must start after the closest approach at t={t_closest:g}"
        )

    model1, model2 = config.particle_models()
    s1 = KinematicSeries(tau=series.tau1, t=series.t, x=series.x1, v=series.v1, c=config.c)
    s2 = KinematicSeries(tau=series.tau2, t=series.t, x=series.x2, v=series.v2, c=config.c)

    before = (drift_summary(s1, model1, pre), drift_summary(s2, model2, pre))
    after = (drift_summary(s1, model1, post), drift_summary(s2, model2, post))
    return ShockReport(
        before=before,
        after=after,
        total_momentum_before=before[0].mean_momentum + before[1].mean_momentum,
        total_momentum_after=after[0].mean_momentum + after[1].mean_momentum,
        closest_approach=closest,
        t_closest=t_closest,
    )
