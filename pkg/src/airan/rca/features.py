"""Per-user fusion of application, RAN, device and mobility observations."""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Mapping

import numpy as np

from ..datacollect import DataRecord
from ..simcore import NodeId, SimTime
from .grid import grid_index

DEVICE_CLASSES = ("phone", "tablet", "cpe", "iot")


class FeatureDomain(enum.Enum):
    APP = "App"
    RAN = "RAN"
    UE = "UE"
    MOB = "Mob"


class MissingDomain(LookupError):
    def __init__(self, domain: FeatureDomain, ue: NodeId | None = None):
        where = f" for {ue}" if ue is not None else ""
        super().__init__(f"no {domain.value} observations{where}")
        self.domain = domain


@dataclass(frozen=True)
class FusedFeatures:
    # app
    tcp_rtt: float
    packet_loss: float
    # ran
    sinr: float
    rsrp: float
    handover_failures: int
    cell_load: float
    # ue
    device_class: str
    battery_low: bool
    # mobility
    grids_visited: int
    speed: float

    def __post_init__(self):
        if not 0 <= self.packet_loss <= 1 or not 0 <= self.cell_load <= 1:
            raise ValueError("packet_loss and cell_load are fractions in [0, 1]")
        if self.handover_failures < 0 or self.grids_visited < 0 or self.speed < 0:
            raise ValueError("counts and speed must be non-negative")

    def as_dict(self) -> dict:
        return asdict(self)

    def to_vector(self) -> np.ndarray:
        return np.array([_encode(f, getattr(self, f)) for f in FEATURE_NAMES], dtype=np.float64)


FEATURE_NAMES: tuple[str, ...] = tuple(f.name for f in fields(FusedFeatures))


def _encode(name: str, value) -> float:
    if name == "device_class":
        return float(DEVICE_CLASSES.index(value)) if value in DEVICE_CLASSES else -1.0
    return float(value)


def encode_mapping(values: Mapping) -> np.ndarray:
    return np.array([_encode(f, values[f]) for f in FEATURE_NAMES], dtype=np.float64)


def _window(records: Iterable[DataRecord], ue: NodeId, window: tuple[SimTime, SimTime]) -> list[DataRecord]:
    t0, t1 = window
    return sorted((r for r in records if r.ue == ue and t0 <= r.time < t1), key=lambda r: r.time)


def _mean(rs: list[DataRecord], name: str) -> float:
    return math.fsum(r.attrs[name] for r in rs) / len(rs)


def fuse_features(ue: NodeId, window: tuple[SimTime, SimTime],
                  sources: Mapping[FeatureDomain, Iterable[DataRecord]]) -> FusedFeatures:
    """One feature vector for ``ue`` over ``[t0, t1)``.

    Rates and levels are window means, failure counts are window sums and
    mobility is summarised as distinct grid cells visited plus mean speed.
    """
    rows = {}
    for dom in FeatureDomain:
        if dom not in sources:
            raise MissingDomain(dom, ue)
        rows[dom] = _window(sources[dom], ue, window)
        if not rows[dom]:
            raise MissingDomain(dom, ue)
    app, ran, dev, mob = rows[FeatureDomain.APP], rows[FeatureDomain.RAN], rows[FeatureDomain.UE], rows[FeatureDomain.MOB]
    return FusedFeatures(
        tcp_rtt=_mean(app, "tcp_rtt"),
        packet_loss=_mean(app, "packet_loss"),
        sinr=_mean(ran, "sinr"),
        rsrp=_mean(ran, "rsrp"),
        handover_failures=int(sum(r.attrs["handover_failures"] for r in ran)),
        cell_load=_mean(ran, "prb_util"),
        device_class=dev[-1].attrs["device_class"],
        battery_low=any(bool(r.attrs["battery_low"]) for r in dev),
        grids_visited=len({grid_index(r.attrs["position_x"], r.attrs["position_y"]) for r in mob}),
        speed=_mean(mob, "velocity"),
    )
