from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from ..datacollect import DataRecord
from .registry import Command, InvalidTransition, LifecycleState, ModelHandle, ModelRepository


class EmptyValidationSet(ValueError):
    pass


HIGHER_IS_BETTER = {"accuracy": True, "precision": True, "recall": True,
                    "mae": False, "mse": False, "rmse": False}


@dataclass(frozen=True)
class MetricBound:
    metric: str
    bound: float

    @property
    def higher_is_better(self) -> bool:
        return HIGHER_IS_BETTER[self.metric]

    def met(self, value: float) -> bool:
        return value >= self.bound if self.higher_is_better else value <= self.bound


def score(metric: str, y_true: Sequence[Any], y_pred: Sequence[Any]) -> float:
    if metric == "accuracy":
        return float(np.mean([a == b for a, b in zip(y_true, y_pred)]))
    if metric in ("precision", "recall"):
        labels = sorted(set(y_true) | set(y_pred), key=str)
        vals = []
        for c in labels:
            tp = sum(1 for a, b in zip(y_true, y_pred) if a == c and b == c)
            denom = sum(1 for b in (y_pred if metric == "precision" else y_true) if b == c)
            vals.append(tp / denom if denom else 0.0)
        return float(np.mean(vals))
    err = np.asarray(y_pred, dtype=float) - np.asarray(y_true, dtype=float)
    if metric == "mae":
        return float(np.mean(np.abs(err)))
    if metric == "mse":
        return float(np.mean(err ** 2))
    if metric == "rmse":
        return float(np.sqrt(np.mean(err ** 2)))
    raise ValueError(f"unknown metric {metric!r}")


def validate(repo: ModelRepository, handle: ModelHandle, validation_set: Sequence[DataRecord],
             threshold: MetricBound, predictor: Callable[[DataRecord], Any] | None = None,
             label: str = "label") -> bool:
    """Score the model on a held-out set and move it to VALIDATED or back to REGISTERED.

    ``predictor`` defaults to the artifact stored with the model, which must be
    callable on a record.
    """
    state = repo.state(handle)
    if state is not LifecycleState.TRAINED:
        raise InvalidTransition(state, Command.VALIDATE_PASS, "only TRAINED models are validated")
    if not validation_set:
        raise EmptyValidationSet(str(handle))
    predict = predictor if predictor is not None else repo.entry(handle).artifact
    y_true = [r.attrs[label] for r in validation_set]
    y_pred = [predict(r) for r in validation_set]
    ok = threshold.met(score(threshold.metric, y_true, y_pred))
    repo.transition(handle, Command.VALIDATE_PASS if ok else Command.VALIDATE_FAIL)
    return ok
