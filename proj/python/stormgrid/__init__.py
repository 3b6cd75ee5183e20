"""Typhoon resilience assessment for transmission grids."""

from ._core import (
    CorrectionModel,
    HardeningMode,
    NetworkCase,
    RunConfig,
    RunMode,
    StateEnumeration,
    StormgridError,
    __version__,
    ahp_priority,
    feature_names,
    max_wind_radius_km,
    min_load_shed,
    peak_wind_speed,
    radial_wind_speed,
    rain_10min,
    run,
    scenario_probabilities,
)

__all__ = [
    "CorrectionModel",
    "HardeningMode",
    "NetworkCase",
    "RunConfig",
    "RunMode",
    "StateEnumeration",
    "StormgridError",
    "__version__",
    "ahp_priority",
    "feature_names",
    "max_wind_radius_km",
    "min_load_shed",
    "peak_wind_speed",
    "radial_wind_speed",
    "rain_10min",
    "run",
    "scenario_probabilities",
]
