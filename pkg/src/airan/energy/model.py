"""Network energy as the sum over stations and slots of per-component power."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kernels

COMPONENTS = ("pa", "transceiver", "digital_if", "baseband", "static")


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class EnergyProfile:
    """Affine power sub-models, all in watts.

    Per active channel: PA ``pa_intercept + pa_slope * P`` (P is that
    channel's transmit power), ``transceiver``, and ``digital_if`` per active
    carrier. Per station: ``baseband`` per active carrier and ``static``.
    """

    pa_intercept: float = 30.0
    pa_slope: float = 2.5
    transceiver: float = 10.0
    digital_if: float = 5.0
    baseband: float = 40.0
    static: float = 100.0

    def __post_init__(self):
        for name in ("pa_intercept", "pa_slope", "transceiver", "digital_if", "baseband", "static"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass
class ActivityTrace:
    channels: np.ndarray        # (N, T) active channels m(t)
    carriers: np.ndarray        # (N, T) active carriers c(t)
    tx_power: np.ndarray        # (N, T) transmit power per active channel, W
    slot_seconds: float = 900.0
    max_channels: int = 8
    max_carriers: int = 3
    carried_load: np.ndarray | None = None
    deferrals: list = field(default_factory=list)

    def __post_init__(self):
        self.channels = np.ascontiguousarray(np.atleast_2d(self.channels), dtype=np.int64)
        self.carriers = np.ascontiguousarray(np.atleast_2d(self.carriers), dtype=np.int64)
        self.tx_power = np.ascontiguousarray(np.atleast_2d(self.tx_power), dtype=np.float64)
        if not (self.channels.shape == self.carriers.shape == self.tx_power.shape):
            raise DimensionMismatch(
                f"channels {self.channels.shape}, carriers {self.carriers.shape}, power {self.tx_power.shape}")
        if not self.slot_seconds > 0:
            raise ValueError("slot_seconds must be positive")
        if (self.channels < 0).any() or (self.channels > self.max_channels).any():
            raise ValueError("active channels outside [0, max_channels]")
        if (self.carriers < 0).any() or (self.carriers > self.max_carriers).any():
            raise ValueError("active carriers outside [0, max_carriers]")
        if (self.tx_power < 0).any():
            raise ValueError("negative transmit power")

    @property
    def shape(self) -> tuple[int, int]:
        return self.channels.shape


def energy_breakdown(trace: ActivityTrace, profile: EnergyProfile) -> np.ndarray:
    """Power of each component per station and slot, shape ``(5, N, T)`` in watts."""
    p = profile
    return kernels.energy_breakdown(trace.channels, trace.carriers, trace.tx_power,
                                    float(p.pa_intercept), float(p.pa_slope), float(p.transceiver),
                                    float(p.digital_if), float(p.baseband), float(p.static))


def total_energy(trace: ActivityTrace, profile: EnergyProfile) -> float:
    """Total energy in joules."""
    parts = energy_breakdown(trace, profile)
    power = parts[0] + parts[1] + parts[2] + parts[3] + parts[4]
    return float(power.sum()) * trace.slot_seconds


def component_energy(trace: ActivityTrace, profile: EnergyProfile) -> dict[str, float]:
    parts = energy_breakdown(trace, profile)
    return {name: float(parts[i].sum()) * trace.slot_seconds for i, name in enumerate(COMPONENTS)}
