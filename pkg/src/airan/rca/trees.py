"""CART classification trees (Gini) and a bagged ensemble of them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels


@dataclass(frozen=True)
class TreeConfig:
    n_trees: int = 15           # 1 grows a single tree on the full data
    max_depth: int = 10
    min_leaf: int = 3
    max_features: float | None = 0.7   # share of features tried per split; None means all
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1 or self.max_depth < 0 or self.min_leaf < 1:
            raise ValueError("invalid tree config")
        if self.max_features is not None and not 0 < self.max_features <= 1:
            raise ValueError("max_features must be in (0, 1]")


class DecisionTree:
    """Binary tree stored as flat arrays; ``x[feature] <= threshold`` goes left."""

    def __init__(self, max_depth: int = 10, min_leaf: int = 1, max_features: float | None = None):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.n_classes = 0
        self.feature: np.ndarray = np.empty(0, np.int64)
        self.threshold: np.ndarray = np.empty(0)
        self.left: np.ndarray = np.empty(0, np.int64)
        self.right: np.ndarray = np.empty(0, np.int64)
        self.proba: np.ndarray = np.empty((0, 0))

    def fit(self, X: np.ndarray, y: np.ndarray, n_classes: int,
            rng: np.random.Generator | None = None, sample: np.ndarray | None = None) -> "DecisionTree":
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.int64)
        self.n_classes = n_classes
        n_feat = X.shape[1]
        k = n_feat if self.max_features is None else max(1, int(round(self.max_features * n_feat)))
        all_features = np.arange(n_feat, dtype=np.int64)
        feature, threshold, left, right, proba = [], [], [], [], []

        def new_node(idx):
            counts = np.bincount(y[idx], minlength=n_classes)
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            proba.append(counts / counts.sum())
            return len(feature) - 1, counts

        root_idx = np.arange(len(y), dtype=np.int64) if sample is None else np.ascontiguousarray(sample, np.int64)
        stack = [(root_idx, 0, None)]
        while stack:
            idx, depth, parent = stack.pop()
            node, counts = new_node(idx)
            if parent is not None:
                p, side = parent
                (left if side == 0 else right)[p] = node
            if depth >= self.max_depth or np.count_nonzero(counts) <= 1 or len(idx) < 2 * self.min_leaf:
                continue
            feats = all_features
            if k < n_feat and rng is not None:
                feats = np.sort(rng.choice(n_feat, size=k, replace=False)).astype(np.int64)
            f, thr, gain = kernels.best_split(X, y, idx, feats, n_classes, self.min_leaf)
            if f < 0 or gain <= 1e-12:
                continue
            feature[node] = f
            threshold[node] = thr
            go_left = X[idx, f] <= thr
            # right child pushed first so the left subtree gets the lower node ids
            stack.append((idx[~go_left], depth + 1, (node, 1)))
            stack.append((idx[go_left], depth + 1, (node, 0)))
        self.feature = np.array(feature, dtype=np.int64)
        self.threshold = np.array(threshold)
        self.left = np.array(left, dtype=np.int64)
        self.right = np.array(right, dtype=np.int64)
        self.proba = np.array(proba)
        return self

    @property
    def node_count(self) -> int:
        return len(self.feature)

    def leaf_of(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            rows = np.nonzero(active)[0]
            cur = node[rows]
            go_left = X[rows, self.feature[cur]] <= self.threshold[cur]
            node[rows] = np.where(go_left, self.left[cur], self.right[cur])
            active = self.feature[node] >= 0
        return node

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.proba[self.leaf_of(X)]

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


class TreeEnsemble:
    """Bootstrap-aggregated trees; a single tree is grown on the full data when ``n_trees == 1``."""

    def __init__(self, config: TreeConfig | None = None):
        self.config = config or TreeConfig()
        self.trees: list[DecisionTree] = []
        self.n_classes = 0

    def fit(self, X: np.ndarray, y: np.ndarray, n_classes: int | None = None) -> "TreeEnsemble":
        cfg = self.config
        y = np.asarray(y, dtype=np.int64)
        self.n_classes = int(n_classes if n_classes is not None else y.max() + 1)
        rng = np.random.default_rng(cfg.seed)
        self.trees = []
        for _ in range(cfg.n_trees):
            if cfg.n_trees == 1:
                tree = DecisionTree(cfg.max_depth, cfg.min_leaf, None)
                tree.fit(X, y, self.n_classes)
            else:
                sample = np.sort(rng.integers(0, len(y), size=len(y)))
                tree = DecisionTree(cfg.max_depth, cfg.min_leaf, cfg.max_features)
                tree.fit(X, y, self.n_classes, rng=rng, sample=sample)
            self.trees.append(tree)
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        acc = self.trees[0].predict_proba(X)
        for t in self.trees[1:]:
            acc = acc + t.predict_proba(X)
        return acc / len(self.trees)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)
