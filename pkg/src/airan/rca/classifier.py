"""Learned root-cause / user-type diagnosis and the threshold-rule baseline."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..modelmgmt import Command, ModelDescriptor, ModelHandle, ModelRepository, UseCase
from .features import FEATURE_NAMES, FusedFeatures, encode_mapping
from .labels import ROOT_CAUSES, USER_TYPES, RcaLabel, RootCause
from .trees import TreeConfig, TreeEnsemble


class DegenerateDataset(ValueError):
    pass


class SchemaMismatch(ValueError):
    pass


@dataclass(frozen=True)
class RcaConfig:
    tree: TreeConfig = field(default_factory=TreeConfig)
    model_id: str = "rca"
    dataset_id: str = "rca-train"


@dataclass
class RcaClassifier:
    schema: tuple[str, ...]
    cause_model: TreeEnsemble
    type_model: TreeEnsemble
    train_accuracy: float
    handle: ModelHandle | None = None

    def predict(self, X: np.ndarray) -> list[RcaLabel]:
        causes = self.cause_model.predict(X)
        types = self.type_model.predict(X)
        return [RcaLabel(ROOT_CAUSES[c], USER_TYPES[u]) for c, u in zip(causes, types)]


def _matrix(rows: Sequence[FusedFeatures]) -> np.ndarray:
    return np.array([r.to_vector() for r in rows], dtype=np.float64)


def train_classifier(dataset: Sequence[tuple[FusedFeatures, RcaLabel]], config: RcaConfig | None = None,
                     repository: ModelRepository | None = None) -> RcaClassifier:
    """Fit the tree ensembles; with a repository, register the model as trained on ``dataset_id``."""
    config = config or RcaConfig()
    if not dataset:
        raise DegenerateDataset("empty training set")
    X = _matrix([f for f, _ in dataset])
    yc = np.array([ROOT_CAUSES.index(lab.root_cause) for _, lab in dataset], dtype=np.int64)
    yu = np.array([USER_TYPES.index(lab.user_type) for _, lab in dataset], dtype=np.int64)
    if len(np.unique(yc)) < 2:
        raise DegenerateDataset("training set holds a single root cause")
    cause = TreeEnsemble(config.tree).fit(X, yc, len(ROOT_CAUSES))
    utype = TreeEnsemble(config.tree).fit(X, yu, len(USER_TYPES))
    acc = float(np.mean(cause.predict(X) == yc))
    clf = RcaClassifier(FEATURE_NAMES, cause, utype, acc)
    if repository is not None:
        repository.register_dataset(config.dataset_id)
        versions = repository.versions(config.model_id)
        version = versions[-1].version + 1 if versions else 1
        node_count = sum(t.node_count for t in cause.trees) + sum(t.node_count for t in utype.trees)
        h = repository.register_model(ModelDescriptor(config.model_id, version, UseCase.RCA,
                                                      parameter_count=node_count), clf)
        repository.transition(h, Command.TRAIN_DONE, [config.dataset_id])
        clf.handle = h
    return clf


def diagnose(classifier: RcaClassifier, features: FusedFeatures | Mapping) -> RcaLabel:
    if isinstance(features, FusedFeatures):
        values = features.as_dict()
    else:
        values = dict(features)
    if tuple(sorted(values)) != tuple(sorted(classifier.schema)):
        extra = sorted(set(values) - set(classifier.schema))
        missing = sorted(set(classifier.schema) - set(values))
        raise SchemaMismatch(f"extra fields {extra}, missing fields {missing}")
    return classifier.predict(encode_mapping(values)[None, :])[0]


def diagnose_many(classifier: RcaClassifier, rows: Sequence[FusedFeatures]) -> list[RcaLabel]:
    return classifier.predict(_matrix(rows))


def rule_baseline(f: FusedFeatures, rtt_median: float = 40.0) -> RootCause:
    """Fixed threshold rules, first match wins."""
    if f.rsrp < -110:
        return RootCause.WEAK_COVERAGE
    if f.rsrp >= -100 and f.sinr < 0:
        return RootCause.INTERFERENCE
    if f.handover_failures > 0:
        return RootCause.HANDOVER_FAILURE
    if f.tcp_rtt > 2 * rtt_median and f.rsrp >= -110 and f.sinr >= 0:
        return RootCause.CONGESTION
    return RootCause.NORMAL


def precision_recall(y_true: Sequence, y_pred: Sequence, classes: Sequence) -> dict:
    """Per-class precision and recall; a class never predicted has precision 0."""
    t = np.array([classes.index(v) for v in y_true])
    p = np.array([classes.index(v) for v in y_pred])
    out = {}
    for i, c in enumerate(classes):
        tp = int(np.sum((t == i) & (p == i)))
        npred, ntrue = int(np.sum(p == i)), int(np.sum(t == i))
        out[c] = (tp / npred if npred else 0.0, tp / ntrue if ntrue else 0.0)
    return out
