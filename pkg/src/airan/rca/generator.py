"""Synthetic users with a planted root cause, for training and benchmarking RCA."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import DEVICE_CLASSES, FusedFeatures
from .labels import ROOT_CAUSES, USER_TYPES, RcaLabel, RootCause, UserType, user_type_for

# (lo, hi) per feature and cause; causes not listed use the healthy ranges
HEALTHY = {
    "rsrp": (-100.0, -80.0),
    "sinr": (5.0, 25.0),
    "cell_load": (0.1, 0.45),
    "rtt_factor": (1.0, 1.0),
    "packet_loss": (0.0, 0.01),
}
PLANTED = {
    RootCause.WEAK_COVERAGE: {"rsrp": (-120.0, -108.0), "sinr": (0.0, 8.0), "packet_loss": (0.01, 0.05)},
    RootCause.INTERFERENCE: {"rsrp": (-95.0, -85.0), "sinr": (-5.0, 0.0), "packet_loss": (0.02, 0.08)},
    RootCause.HANDOVER_FAILURE: {"rsrp": (-105.0, -90.0), "sinr": (0.0, 12.0)},
    RootCause.CONGESTION: {"cell_load": (0.5, 0.95), "rtt_factor": (2.0, 4.0)},
    RootCause.NORMAL: {},
}
BASE_RTT = (20.0, 60.0)     # ms; median 40
USER_TYPE_MIX = (0.4, 0.4, 0.2)
WINDOW_SECONDS = 60.0


@dataclass(frozen=True)
class GeneratorConfig:
    overlap: float = 0.1
    cause_weights: tuple[float, ...] = (0.2, 0.2, 0.2, 0.2, 0.2)

    def __post_init__(self):
        if not 0 <= self.overlap <= 1:
            raise ValueError("overlap must be in [0, 1]")
        if len(self.cause_weights) != len(ROOT_CAUSES) or min(self.cause_weights) < 0:
            raise ValueError("one non-negative weight per root cause")


def _draw(rng: np.random.Generator, lo: float, hi: float, overlap: float) -> float:
    # overlap widens every range by that share of its width on both sides
    pad = overlap * (hi - lo)
    return float(rng.uniform(lo - pad, hi + pad)) if hi > lo else lo


def planted_sample(cause: RootCause, rng: np.random.Generator, overlap: float = 0.1) -> tuple[FusedFeatures, RcaLabel]:
    ranges = {**HEALTHY, **PLANTED[cause]}
    rsrp = _draw(rng, *ranges["rsrp"], overlap)
    sinr = _draw(rng, *ranges["sinr"], overlap)
    load = float(np.clip(_draw(rng, *ranges["cell_load"], overlap), 0.0, 1.0))
    factor = _draw(rng, *ranges["rtt_factor"], overlap)
    loss = float(np.clip(_draw(rng, *ranges["packet_loss"], overlap), 0.0, 1.0))
    rtt = float(rng.uniform(*BASE_RTT)) * max(factor, 0.5)
    if cause is RootCause.HANDOVER_FAILURE:
        hof = int(rng.integers(1, 5))
    else:
        # sporadic failures unrelated to the planted cause
        hof = int(rng.random() < overlap)
    utype = USER_TYPES[int(rng.choice(3, p=USER_TYPE_MIX))]
    if utype is UserType.INDOOR:
        speed = float(rng.uniform(0.0, 1.0))
    elif utype is UserType.OUTDOOR:
        speed = float(rng.uniform(1.0, 80.0))
    else:
        speed = float(rng.uniform(80.0, 300.0))
    if cause is RootCause.HANDOVER_FAILURE and utype is UserType.INDOOR:
        speed = float(rng.uniform(1.0, 80.0))
    utype = user_type_for(speed)
    metres = speed / 3.6 * WINDOW_SECONDS
    grids = 1 + int(metres // 50.0) + int(rng.integers(0, 2))
    features = FusedFeatures(
        tcp_rtt=rtt, packet_loss=loss, sinr=sinr, rsrp=rsrp, handover_failures=hof, cell_load=load,
        device_class=DEVICE_CLASSES[int(rng.integers(len(DEVICE_CLASSES)))],
        battery_low=bool(rng.random() < 0.1), grids_visited=grids, speed=speed)
    return features, RcaLabel(cause, utype)



def planted_dataset(n: int, rng: np.random.Generator,
                    config: GeneratorConfig | None = None) -> list[tuple[FusedFeatures, RcaLabel]]:
    config = config or GeneratorConfig()
    w = np.asarray(config.cause_weights, dtype=np.float64)
    causes = rng.choice(len(ROOT_CAUSES), size=n, p=w / w.sum())
    return [planted_sample(ROOT_CAUSES[c], rng, config.overlap) for c in causes]
