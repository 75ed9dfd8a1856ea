"""Ergodic estimates: velocity distributions, drift summaries, ensemble checks."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kinematics, noise
from .errors import ConfigurationError
from .histogram import Histogram, histogram_from_samples, mean_of, total_variation
from .kinematics import KinematicSeries, ParticleModel
from .noise import NoiseSpec

__all__ = [
    "Histogram",
    "DriftSummary",
    "histogram_from_samples",
    "mean_of",
    "total_variation",
    "velocity_distribution",
    "drift_summary",
    "ergodicity_check",
]


@dataclass(frozen=True)
class DriftSummary:
    """Window-averaged velocity, momentum and kinetic energy of a trajectory."""

    mean_velocity: float
    mean_momentum: float
    mean_kinetic_energy: float
    window: tuple[float, float]


def velocity_distribution(
    model: ParticleModel,
    horizon: float,
    n_samples: int,
    n_bins: int,
    sample_in_lab_time: bool = False,
) -> Histogram:
    """Histogram of the lab velocity sampled over [0, horizon).

    By default samples are taken on a uniform proper-time grid (the velocity
    is a closed-form function of tau).  With ``sample_in_lab_time`` the grid
    is uniform in lab time instead, which weights samples by gamma and yields
    a different distribution.
    """
    if n_bins < 1:
        raise ConfigurationError(f"n_bins must be >= 1, got {n_bins}")
    if n_samples < 10 * n_bins:
        raise ConfigurationError(
            f"need at least 10 samples per bin: n_samples={n_samples}, n_bins={n_bins}"
        )
    if not horizon > 0:
        raise ConfigurationError(f"horizon must be positive, got {horizon}")
    period = noise.fundamental_period(model.noise)
    if horizon < period:
        warnings.warn(
            f"horizon {horizon:g} s is shorter than the fundamental period {period:g} s",
            stacklevel=2,
        )
    if sample_in_lab_time:
        series = kinematics.trajectory(model, horizon, n_samples)
        samples = series.v
    else:
        grid = np.arange(n_samples) * (horizon / n_samples)
        samples = kinematics.velocity_at_proper_time(model, grid)
    return histogram_from_samples(samples, n_bins)


def drift_summary(series: KinematicSeries, model: ParticleModel, window: tuple[float, float]) -> DriftSummary:
    """Drift quantities of a sampled trajectory over a lab-time window.

    mean_velocity is the displacement rate (x(b) - x(a))/(b - a); momentum
    and kinetic energy are trapezoidal time averages of m0*gamma*v and
    m0*c^2*(gamma - 1) over the window.
    """
    a, b = float(window[0]), float(window[1])
    if len(series) < 2:
        raise ConfigurationError("series must contain at least two samples")
    if not (series.t[0] <= a < b <= series.t[-1]):
        raise ConfigurationError(
            f"window ({a:g}, {b:g}) must lie inside the series span "
            f"({series.t[0]:g}, {series.t[-1]:g}) with a < b"
        )

    x_a, x_b = np.interp([a, b], series.t, series.x)
    mean_velocity = (x_b - x_a) / (b - a)

    inside = (series.t > a) & (series.t < b)
    t_w = np.concatenate(([a], series.t[inside], [b]))
    v_w = np.concatenate(([np.interp(a, series.t, series.v)], series.v[inside], [np.interp(b, series.t, series.v)]))
    gamma = 1.0 / np.sqrt(1.0 - (v_w / model.c) ** 2)
    mean_momentum = float(np.trapezoid(model.m0 * gamma * v_w, t_w) / (b - a))
    mean_kinetic = float(np.trapezoid(model.m0 * model.c**2 * (gamma - 1.0), t_w) / (b - a))
    return DriftSummary(
        mean_velocity=float(mean_velocity),
        mean_momentum=mean_momentum,
        mean_kinetic_energy=mean_kinetic,
        window=(a, b),
    )


def ergodicity_check(
    spec: NoiseSpec,
    n_realizations: int,
    horizon: float,
    n_bins: int,
    base_seed: int = 0,
    n_time_samples: int = 65536,
    fixed_tau: float = 0.0,
) -> float:
    """Total-variation distance between time and ensemble force histograms.

    Compares (a) the force of realization ``base_seed`` sampled on a uniform
    proper-time grid over [0, horizon) against (b) the force at the fixed
    proper time ``fixed_tau`` across ``n_realizations`` independent
    realizations (seeds base_seed, base_seed+1, ...).  Both histograms share
    the same bins spanning [-f0, f0].
    """
    if n_realizations < 30:
        raise ConfigurationError(f"need at least 30 realizations, got {n_realizations}")
    if n_bins < 1:
        raise ConfigurationError(f"n_bins must be >= 1, got {n_bins}")

    edges = np.linspace(-spec.f0, spec.f0, n_bins + 1)

    real0 = noise.draw_realization(spec, base_seed)
    time_hist = noise.force_distribution(spec, real0, horizon, n_time_samples, n_bins, edges=edges)

    ensemble = np.empty(n_realizations)
    for k in range(n_realizations):
        real = noise.draw_realization(spec, base_seed + k)
        ensemble[k] = noise.force_at(spec, real, fixed_tau)
    ens_hist = histogram_from_samples(ensemble, n_bins, edges=edges)

    return total_variation(time_hist, ens_hist)
