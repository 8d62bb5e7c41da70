"""Operator utility policies and the expected-utility argmax over the action space."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .perception import DEFAULT_CATALOG, AppCatalog, label_posterior
from .predictor import ACTIONS, Action, QualityPrediction, UserContext, predict_quality

Predictor = Callable[[UserContext, Action], QualityPrediction]


class UtilityKind(enum.Enum):
    LATENCY_THRESHOLD = "LATENCY_THRESHOLD"
    LOG_THROUGHPUT = "LOG_THROUGHPUT"
    WEIGHTED_SUM = "WEIGHTED_SUM"


@dataclass(frozen=True)
class UtilityPolicy:
    kind: UtilityKind = UtilityKind.LATENCY_THRESHOLD
    target_ms: float = 30.0
    penalty_slope: float = 1.0
    # WEIGHTED_SUM coefficients on (latency ms, throughput Mbit/s, qoe)
    coefficients: tuple[float, float, float] = (-1.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.target_ms > 0:
            raise ValueError("target_ms must be positive")
        if not all(math.isfinite(c) for c in (self.penalty_slope, *self.coefficients)):
            raise ValueError("utility coefficients must be finite")

    def __call__(self, q: QualityPrediction) -> float:
        if self.kind is UtilityKind.LATENCY_THRESHOLD:
            return -self.penalty_slope * max(0.0, q.latency - self.target_ms)
        if self.kind is UtilityKind.LOG_THROUGHPUT:
            return math.log(q.throughput) if q.throughput > 0 else -math.inf
        a, b, c = self.coefficients
        return a * q.latency + b * q.throughput / 1e6 + c * q.qoe


def expected_utility(ctx: UserContext, action: Action, policy: Callable[[QualityPrediction], float],
                     predictor: Predictor = predict_quality, accuracy: float = 1.0,
                     catalog: AppCatalog = DEFAULT_CATALOG) -> float:
    """Utility averaged over which app the observed label really is."""
    if accuracy >= 1.0:
        return policy(predictor(ctx, action))
    total = 0.0
    for app, p in label_posterior(ctx.app_type, accuracy, catalog).items():
        if p > 0.0:
            total += p * policy(predictor(ctx.with_app(app), action))
    return total


def select_action(ctx: UserContext, policy: Callable[[QualityPrediction], float],
                  predictor: Predictor = predict_quality, accuracy: float = 1.0,
                  catalog: AppCatalog = DEFAULT_CATALOG,
                  actions: Sequence[Action] = ACTIONS) -> Action:
    """Argmax of expected utility; the earliest action in ``actions`` wins ties."""
    if not actions:
        raise ValueError("empty action space")
    best, best_u = actions[0], expected_utility(ctx, actions[0], policy, predictor, accuracy, catalog)
    for a in actions[1:]:
        u = expected_utility(ctx, a, policy, predictor, accuracy, catalog)
        if u > best_u:
            best, best_u = a, u
    return best
