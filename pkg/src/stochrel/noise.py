"""Band-limited white-noise force defined in the particle's proper frame.

The force is a finite comb of equal-amplitude cosines,

    f(tau) = (f0 / N) * sum_{i=1..N} cos(w_i tau + phi_i),
    w_i = bandwidth * i / N,

with the N phases drawn independently and uniformly from [0, 2*pi).  All
frequencies are integer multiples of w_1, so every sample path is periodic
with the fundamental period 2*pi*N/bandwidth, has no zero-frequency
component, and is bounded by f0 in absolute value.

Two integral forms are provided.  ``force_integral`` is the definite
integral from 0 (it vanishes at tau = 0 and matches numerical quadrature of
``force_at``).  ``force_antiderivative`` is the antiderivative whose average
over one fundamental period is zero; it is the form the kinematics layer
feeds into the rapidity so that the integration constant of a particle model
sets the *drift* (period-averaged) rapidity independent of the realization.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .histogram import Histogram, histogram_from_samples

__all__ = [
    "NoiseSpec",
    "Realization",
    "draw_realization",
    "force_at",
    "force_antiderivative",
    "force_integral",
    "force_distribution",
    "fundamental_period",
]

#: cap on intermediate (samples x components) evaluation blocks
_CHUNK_FLOATS = 4_000_000


@dataclass(frozen=True)
class NoiseSpec:
    """Frequency comb of the proper-frame force.

    f0 is the force amplitude bound in Newtons, ``n_components`` the number
    of cosine components, ``bandwidth`` the angular-frequency span in rad/s.
    """

    f0: float
    n_components: int
    bandwidth: float = 8.0 * math.pi

    def __post_init__(self):
        if not self.f0 > 0:
            raise ConfigurationError(f"force amplitude must be positive, got {self.f0}")
        if int(self.n_components) != self.n_components or self.n_components < 1:
            raise ConfigurationError(f"n_components must be a positive integer, got {self.n_components}")
        if not self.bandwidth > 0:
            raise ConfigurationError(f"bandwidth must be positive, got {self.bandwidth}")

    @property
    def frequencies(self) -> np.ndarray:
        """Angular frequencies w_i = bandwidth * i / N, i = 1..N (no DC term)."""
        n = self.n_components
        return self.bandwidth * np.arange(1, n + 1) / n


def fundamental_period(spec: NoiseSpec) -> float:
    """Period of the lowest comb frequency, 2*pi*N/bandwidth.

    Every component frequency is an integer multiple of the lowest one, so
    the whole sample path repeats with this period.
    """
    return 2.0 * math.pi * spec.n_components / spec.bandwidth


@dataclass(frozen=True)
class Realization:
    """One sample path of the force, fixed by its array of random phases."""

    phases: np.ndarray
    seed: int

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=float)
        object.__setattr__(self, "phases", phases)
        if phases.ndim != 1:
            raise ValueError("phases must be a 1-D array")
        if np.any(phases < 0) or np.any(phases >= 2.0 * math.pi):
            raise ValueError("phases must lie in [0, 2*pi)")


def draw_realization(spec: NoiseSpec, seed: int) -> Realization:
    """Draw the N phases i.i.d. uniform on [0, 2*pi).

    Uses numpy's default_rng (PCG64), so the same (spec, seed) pair yields
    bit-identical phases on any platform.
    """
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * math.pi, spec.n_components)
    # uniform() can in principle return the upper bound after rounding
    phases = np.where(phases >= 2.0 * math.pi, 0.0, phases)
    return Realization(phases=phases, seed=int(seed))


def _check_pair(spec: NoiseSpec, real: Realization):
    if real.phases.size != spec.n_components:
        raise ValueError(
            f"realization has {real.phases.size} phases but the spec expects {spec.n_components}"
        )


def _chunked(tau: np.ndarray, n_components: int):
    step = max(1, _CHUNK_FLOATS // max(1, n_components))
    for start in range(0, tau.size, step):
        yield start, tau[start : start + step]


def force_at(spec: NoiseSpec, real: Realization, tau):
    """Evaluate the force at proper time(s) ``tau`` (any real value).

    Returns a float for scalar input, an ndarray for array input; the result
    is bounded by f0 in absolute value.
    """
    _check_pair(spec, real)
    w = spec.frequencies
    phi = real.phases
    amp = spec.f0 / spec.n_components
    tau_arr = np.asarray(tau, dtype=float)
    if tau_arr.ndim == 0:
        return float(amp * np.cos(w * float(tau_arr) + phi).sum())
    flat = tau_arr.ravel()
    out = np.empty(flat.size)
    for start, chunk in _chunked(flat, spec.n_components):
        out[start : start + chunk.size] = np.cos(chunk[:, None] * w[None, :] + phi[None, :]).sum(axis=1)
    return (amp * out).reshape(tau_arr.shape)


def force_antiderivative(spec: NoiseSpec, real: Realization, tau):
    """Antiderivative of the force with zero mean over a fundamental period.

    A(tau) = (f0 / bandwidth) * sum_i sin(w_i tau + phi_i) / i, so that
    A'(tau) = force_at(tau) and the period average of A vanishes.
    """
    _check_pair(spec, real)
    w = spec.frequencies
    phi = real.phases
    inv_i = 1.0 / np.arange(1, spec.n_components + 1)
    scale = spec.f0 / spec.bandwidth
    tau_arr = np.asarray(tau, dtype=float)
    if tau_arr.ndim == 0:
        return float(scale * (np.sin(w * float(tau_arr) + phi) * inv_i).sum())
    flat = tau_arr.ravel()
    out = np.empty(flat.size)
    for start, chunk in _chunked(flat, spec.n_components):
        block = np.sin(chunk[:, None] * w[None, :] + phi[None, :])
        out[start : start + chunk.size] = block @ inv_i
    return (scale * out).reshape(tau_arr.shape)


def force_integral(spec: NoiseSpec, real: Realization, tau):
    """Exact definite integral of the force from 0 to ``tau``.

    Evaluates A(tau) - A(0) in closed form; identically zero at tau = 0 and
    equal to numerical quadrature of ``force_at`` for every tau.
    """
    a0 = force_antiderivative(spec, real, 0.0)
    return force_antiderivative(spec, real, tau) - a0


def force_distribution(
    spec: NoiseSpec,
    real: Realization,
    horizon: float,
    n_samples: int,
    n_bins: int,
    edges=None,
) -> Histogram:
    """Histogram of the force sampled on a uniform proper-time grid.

    The grid covers [0, horizon) end-exclusively, so a horizon of exactly one
    fundamental period samples each component over whole cycles.  Density
    normalized; support is contained in [-f0, f0].
    """
    if n_bins < 1:
        raise ConfigurationError(f"n_bins must be >= 1, got {n_bins}")
    if n_samples < 10 * n_bins:
        raise ConfigurationError(
            f"need at least 10 samples per bin: n_samples={n_samples}, n_bins={n_bins}"
        )
    if not horizon > 0:
        raise ConfigurationError(f"horizon must be positive, got {horizon}")
    period = fundamental_period(spec)
    if horizon < period:
        warnings.warn(
            f"horizon {horizon:g} s is shorter than the fundamental period {period:g} s; "
            "the sampled distribution may be unrepresentative",
            stacklevel=2,
        )
    grid = np.arange(n_samples) * (horizon / n_samples)
    samples = force_at(spec, real, grid)
    return histogram_from_samples(samples, n_bins, edges=edges)
