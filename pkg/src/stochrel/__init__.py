"""Relativistic particle dynamics in a proper-time-stationary random medium."""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    NumericalError,
    ProximityError,
    SingularityError,
    StochrelError,
)
from .histogram import Histogram, histogram_from_samples, mean_of, total_variation
from .kinematics import KinematicSeries, ParticleModel
from .noise import NoiseSpec, Realization, draw_realization
from .stats import DriftSummary

__all__ = [
    "__version__",
    "ConfigurationError",
    "NumericalError",
    "ProximityError",
    "SingularityError",
    "StochrelError",
    "Histogram",
    "histogram_from_samples",
    "mean_of",
    "total_variation",
    "KinematicSeries",
    "ParticleModel",
    "NoiseSpec",
    "Realization",
    "draw_realization",
    "DriftSummary",
]
