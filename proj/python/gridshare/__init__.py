"""Prosumer coalition settlement and grid-resilience toolkit."""

from ._core import (
    ConfigError,
    DailyEnergy,
    DataError,
    FleetSynthesisSpec,
    NumericError,
    TariffSchedule,
    allocate,
    build_visibility,
    check_core,
    check_subadditivity,
    coalition_cost,
    default_tariff,
    fit_forecast,
    percolation_curve,
    resilience_of_series,
    run_study_bundle,
    standalone_cost,
    synthesize_fleet_csv,
)

__all__ = [
    "ConfigError",
    "DailyEnergy",
    "DataError",
    "FleetSynthesisSpec",
    "NumericError",
    "TariffSchedule",
    "allocate",
    "build_visibility",
    "check_core",
    "check_subadditivity",
    "coalition_cost",
    "default_tariff",
    "fit_forecast",
    "percolation_curve",
    "resilience_of_series",
    "run_study_bundle",
    "standalone_cost",
    "synthesize_fleet_csv",
]
