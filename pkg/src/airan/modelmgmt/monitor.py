"""Three-dimensional performance monitoring and retraining triggers."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..simcore import SECOND, SimTime
from .registry import LifecycleState, ModelHandle, ModelRepository, NotActive

DEFAULT_WINDOW: SimTime = 60 * SECOND

FRACTION_METRICS = frozenset({
    "accuracy", "precision", "recall", "packet_loss_rate", "compute_utilization",
    "adversarial_success_rate", "generalization",
})


@dataclass(frozen=True)
class MonitoringReport:
    """One tumbling window of metrics for a model.

    ``model_metrics``, ``network_metrics`` and ``resource_metrics`` are the
    model-performance, network-performance and resource-performance
    dimensions respectively. Metrics such as ``adversarial_success_rate`` or
    ``generalization`` are carried through when supplied but never computed.
    """

    handle: ModelHandle
    window: tuple[SimTime, SimTime]
    model_metrics: dict = field(default_factory=dict)
    network_metrics: dict = field(default_factory=dict)
    resource_metrics: dict = field(default_factory=dict)

    def __post_init__(self):
        start, end = self.window
        if not end > start:
            raise ValueError("window end must be after its start")
        for block in (self.model_metrics, self.network_metrics, self.resource_metrics):
            for name, value in block.items():
                if name in FRACTION_METRICS and not 0.0 <= value <= 1.0:
                    raise ValueError(f"{name}={value} is not a fraction")

    def metric(self, name: str) -> float:
        for block in (self.model_metrics, self.network_metrics, self.resource_metrics):
            if name in block:
                return block[name]
        raise KeyError(name)


class RetrainMode(enum.Enum):
    PERFORMANCE_TRIGGERED = "PERFORMANCE_TRIGGERED"
    PERIODIC = "PERIODIC"


@dataclass(frozen=True)
class DegradationRule:
    metric: str
    bound: float
    higher_is_better: bool = True

    def breached(self, value: float) -> bool:
        return value < self.bound if self.higher_is_better else value > self.bound


@dataclass(frozen=True)
class RetrainPolicy:
    mode: RetrainMode
    rule: DegradationRule | None = None
    k: int = 1
    period: SimTime | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.mode is RetrainMode.PERIODIC and not (self.period and self.period > 0):
            raise ValueError("PERIODIC retraining needs a positive period")
        if self.mode is RetrainMode.PERFORMANCE_TRIGGERED and self.rule is None:
            raise ValueError("PERFORMANCE_TRIGGERED retraining needs a degradation rule")


class MonitorAction(enum.Enum):
    NONE = "NONE"
    RETRAIN_REQUESTED = "RETRAIN_REQUESTED"
    FALLBACK = "FALLBACK"


@dataclass
class _Track:
    breaches: int = 0
    last_retrain: SimTime | None = None


class ModelMonitor:
    def __init__(self, repo: ModelRepository):
        self.repo = repo
        self._tracks: dict[ModelHandle, _Track] = {}
        self.retrain_requests: list[tuple[SimTime, ModelHandle, str]] = []

    def monitor(self, report: MonitoringReport, policy: RetrainPolicy) -> MonitorAction:
        h = report.handle
        if self.repo.state(h) is not LifecycleState.ACTIVE:
            raise NotActive(f"{h} is {self.repo.state(h).value}")
        track = self._tracks.setdefault(h, _Track())
        end = report.window[1]
        if policy.mode is RetrainMode.PERIODIC:
            if track.last_retrain is None:
                track.last_retrain = report.window[0]
            if end - track.last_retrain >= policy.period:
                track.last_retrain += policy.period * ((end - track.last_retrain) // policy.period)
                self.retrain_requests.append((end, h, "periodic"))
                return MonitorAction.RETRAIN_REQUESTED
            return MonitorAction.NONE
        if policy.rule.breached(report.metric(policy.rule.metric)):
            track.breaches += 1
        else:
            track.breaches = 0
        if track.breaches >= policy.k:
            track.breaches = 0
            self.repo.engage_fallback(h)
            self.retrain_requests.append((end, h, "degradation"))
            return MonitorAction.FALLBACK
        return MonitorAction.NONE


def monitor(monitor_: ModelMonitor, report: MonitoringReport, policy: RetrainPolicy) -> MonitorAction:
    return monitor_.monitor(report, policy)
