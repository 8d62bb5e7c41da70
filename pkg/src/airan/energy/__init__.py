"""Network energy accounting and energy-saving policies."""
from .forecast import InsufficientHistory, diurnal_load, predict_load, rolling_forecast
from .model import (COMPONENTS, ActivityTrace, DimensionMismatch, EnergyProfile, component_energy,
                    energy_breakdown, total_energy)
from .policies import (Deferral, EsKind, EsPolicy, SeriesLengthMismatch, StationConfig, apply_policy,
                       predictive_mask, qos_violations)

__all__ = [
    "COMPONENTS", "ActivityTrace", "Deferral", "DimensionMismatch", "EnergyProfile", "EsKind", "EsPolicy",
    "InsufficientHistory", "SeriesLengthMismatch", "StationConfig", "apply_policy", "component_energy",
    "diurnal_load", "energy_breakdown", "predict_load", "predictive_mask", "qos_violations",
    "rolling_forecast", "total_energy",
]
