"""Context, action space and the analytic service-quality predictor."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, replace

from ..simcore import NodeId
from .perception import DEFAULT_CATALOG, AppCatalog, UnknownApp

WEIGHT_LEVELS = tuple(range(1, 9))
GRANT_LEVELS = (0.05, 0.1, 0.2, 0.4)


class MobilityState(enum.Enum):
    STATIC = "STATIC"
    PEDESTRIAN = "PEDESTRIAN"
    VEHICULAR = "VEHICULAR"
    HIGH_SPEED = "HIGH_SPEED"


@dataclass(frozen=True)
class UserContext:
    ue: NodeId
    app_type: str
    rsrp: float
    prb_util: float
    mobility_state: MobilityState = MobilityState.STATIC
    vip: bool = False

    def __post_init__(self):
        if not -140.0 <= self.rsrp <= -40.0:
            raise ValueError(f"rsrp {self.rsrp} outside [-140, -40] dBm")
        if not 0.0 <= self.prb_util <= 1.0:
            raise ValueError(f"prb_util {self.prb_util} outside [0, 1]")

    def with_app(self, app: str) -> "UserContext":
        return replace(self, app_type=app)


@dataclass(frozen=True, order=True)
class Action:
    scheduling_weight: int
    resource_grant: float

    def __post_init__(self):
        if self.scheduling_weight not in WEIGHT_LEVELS or self.resource_grant not in GRANT_LEVELS:
            raise ValueError(f"{self} is not in the action space")

    @property
    def index(self) -> int:
        """Canonical position: weight-major, grant-minor, both ascending."""
        return (WEIGHT_LEVELS.index(self.scheduling_weight) * len(GRANT_LEVELS)
                + GRANT_LEVELS.index(self.resource_grant))


ACTIONS: tuple[Action, ...] = tuple(Action(w, g) for w, g in itertools.product(WEIGHT_LEVELS, GRANT_LEVELS))
DEFAULT_ACTION = ACTIONS[0]


@dataclass(frozen=True)
class QualityPrediction:
    latency: float       # ms
    throughput: float    # bit/s
    qoe: float

    def __post_init__(self):
        if min(self.latency, self.throughput, self.qoe) < 0:
            raise ValueError("quality metrics must be non-negative")


def effective_load(prb_util: float, grant: float) -> float:
    # the dedicated grant shields that share of the user's traffic from contention
    return prb_util * (1.0 - grant)


def congestion_factor(load: float) -> float:
    return 1.0 / (1.0 - min(load, 0.95))


def coverage_penalty(rsrp: float) -> float:
    return max(1.0, 2.0 ** ((-85.0 - rsrp) / 20.0))


def weight_factor(weight: int) -> float:
    return 1.0 + 0.25 * (weight - 1)


def cell_rate(rsrp: float) -> float:
    """Full-cell downlink rate (bit/s) by coverage tier."""
    if rsrp >= -95.0:
        return 400e6
    if rsrp >= -105.0:
        return 200e6
    return 80e6


def qoe_score(latency_ms: float, throughput: float) -> float:
    return 5.0 / (1.0 + latency_ms / 50.0) * throughput / (throughput + 5e6)


class AnalyticPredictor:
    """M/M/1-style congestion, log-domain coverage penalty and weighted share."""

    def __init__(self, catalog: AppCatalog = DEFAULT_CATALOG):
        self.catalog = catalog

    def __call__(self, ctx: UserContext, action: Action) -> QualityPrediction:
        try:
            base = self.catalog.base_latency[ctx.app_type]
        except KeyError:
            raise UnknownApp(ctx.app_type) from None
        rho = effective_load(ctx.prb_util, action.resource_grant)
        latency = (base * congestion_factor(rho) * coverage_penalty(ctx.rsrp)
                   / weight_factor(action.scheduling_weight))
        throughput = action.resource_grant * cell_rate(ctx.rsrp)
        return QualityPrediction(latency, throughput, qoe_score(latency, throughput))


predict_quality = AnalyticPredictor()
