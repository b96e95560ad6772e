"""Coverage-gap analysis of clinic networks with persistent homology."""

from ._core import (
    ProviderError,
    ValidationError,
    brunner_munzel,
    haversine_km,
    k_nearest,
    log_transform,
    mann_whitney,
    origin_weighted_time,
    persistence,
    symmetrized_dissimilarity,
    trim_short_deaths,
    vehicle_access_ratio,
)

__all__ = [
    "ProviderError",
    "ValidationError",
    "brunner_munzel",
    "haversine_km",
    "k_nearest",
    "log_transform",
    "mann_whitney",
    "origin_weighted_time",
    "persistence",
    "symmetrized_dissimilarity",
    "trim_short_deaths",
    "vehicle_access_ratio",
]
