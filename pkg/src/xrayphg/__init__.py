"""Numerical boundary asymptotics of the geodesic X-ray transform on simple surfaces."""

from .errors import (
    DivergenceError,
    FitError,
    IllConditionedError,
    IntegrabilityError,
    InsufficientSmoothnessError,
    ModelMismatchError,
    OutOfChartError,
    ParameterError,
    PoleError,
    RankDeficiencyError,
    TrappingError,
    VanishingWeightError,
)
from .geometry import DiskModel, RadialModel, model_from_config

__version__ = "0.1.0"

__all__ = [
    "DiskModel",
    "RadialModel",
    "model_from_config",
    "DivergenceError",
    "FitError",
    "IllConditionedError",
    "IntegrabilityError",
    "InsufficientSmoothnessError",
    "ModelMismatchError",
    "OutOfChartError",
    "ParameterError",
    "PoleError",
    "RankDeficiencyError",
    "TrappingError",
    "VanishingWeightError",
]
