"""Density-normalized histograms for empirical distribution estimates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

#: tolerance on the density-normalization integral
_NORM_TOL = 1e-12


@dataclass(frozen=True)
class Histogram:
    """Binned empirical distribution.

    ``density[k]`` is the estimated probability density on
    ``[edges[k], edges[k+1])``; when ``density_normalized`` is set the
    densities integrate to one.
    """

    edges: np.ndarray
    density: np.ndarray
    n_samples: int
    density_normalized: bool = True

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        density = np.asarray(self.density, dtype=float)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "density", density)
        if edges.ndim != 1 or density.ndim != 1 or edges.size != density.size + 1:
            raise ValueError("need n_bins+1 edges for n_bins densities")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("histogram edges must be strictly increasing")
        if np.any(density < 0):
            raise ValueError("densities must be non-negative")
        if self.density_normalized:
            total = float(np.sum(density * np.diff(edges)))
            if abs(total - 1.0) > _NORM_TOL:
                raise ValueError(f"density integral is {total!r}, expected 1 within {_NORM_TOL}")

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def masses(self) -> np.ndarray:
        """Per-bin probability mass (density times width)."""
        return self.density * self.widths


def histogram_from_samples(samples, n_bins: int, edges=None) -> Histogram:
    """Build a density-normalized histogram from raw samples.

    Without explicit ``edges``, equal-width bins cover the observed sample
    range expanded by one bin width (half a width on each side), so no sample
    sits exactly on an outer edge.  Degenerate all-equal samples get a unit
    width bin around the common value.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if n_bins < 1:
        raise ConfigurationError(f"n_bins must be >= 1, got {n_bins}")
    if samples.size == 0:
        raise ConfigurationError("cannot histogram an empty sample set")

    if edges is None:
        lo, hi = float(samples.min()), float(samples.max())
        if hi > lo:
            width = (hi - lo) / n_bins if n_bins == 1 else (hi - lo) / (n_bins - 1)
            edges = np.linspace(lo - width / 2.0, hi + width / 2.0, n_bins + 1)
        else:
            edges = np.linspace(lo - 0.5, lo + 0.5, n_bins + 1)
    else:
        edges = np.asarray(edges, dtype=float)
        if edges.size != n_bins + 1:
            raise ConfigurationError(f"expected {n_bins + 1} edges, got {edges.size}")

    counts, edges = np.histogram(samples, bins=edges)
    widths = np.diff(edges)
    density = counts / (samples.size * widths)
    return Histogram(edges=edges, density=density, n_samples=int(samples.size))


def mean_of(hist: Histogram) -> float:
    """Mean of the binned distribution: sum of midpoint * density * width."""
    if not hist.density_normalized:
        raise ValueError("mean_of requires a density-normalized histogram")
    return float(np.sum(hist.midpoints * hist.masses))


def total_variation(p: Histogram, q: Histogram) -> float:
    """Total-variation distance between two histograms on identical bins."""
    if p.edges.shape != q.edges.shape or not np.allclose(p.edges, q.edges, rtol=0, atol=0):
        raise ValueError("histograms must share identical bin edges")
    return 0.5 * float(np.abs(p.masses - q.masses).sum())
