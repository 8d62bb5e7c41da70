"""Federated training of linear models over simulator messages, plus edge fine-tuning."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..datacollect import AiPayload, BearerLink, DataRecord
from ..simcore import AI_NODE, NodeId, SECOND, SimTime, Simulator
from .compute import ComputeCapability


class EmptyRound(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class NoParticipants(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LocalUpdate:
    client: NodeId
    round: int
    weights: np.ndarray
    sample_count: int

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")


def fed_aggregate(updates: Sequence[LocalUpdate]) -> np.ndarray:
    """Sample-count weighted mean of the client weight vectors."""
    if not updates:
        raise EmptyRound("no updates to aggregate")
    size = updates[0].weights.shape
    rnd = updates[0].round
    for u in updates:
        if u.weights.shape != size:
            raise LengthMismatch(f"{u.client} sent {u.weights.shape}, expected {size}")
        if u.round != rnd:
            raise ValueError(f"{u.client} sent round {u.round} into round {rnd}")
    if len(updates) == 1:
        return np.array(updates[0].weights, dtype=np.float64)
    counts = np.array([u.sample_count for u in updates], dtype=np.float64)
    stacked = np.stack([np.asarray(u.weights, dtype=np.float64) for u in updates])
    # offsets from the first update keep identical updates exact
    base = stacked[0]
    return base + (counts @ (stacked - base)) / counts.sum()


# -- linear least squares ------------------------------------------------------

def mse(w: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    r = X @ w - y
    return float(r @ r / len(y))


def gd_steps(w: np.ndarray, X: np.ndarray, y: np.ndarray, steps: int, lr: float) -> np.ndarray:
    w = np.array(w, dtype=np.float64)
    scale = 2.0 / len(y)
    for _ in range(steps):
        w -= lr * scale * (X.T @ (X @ w - y))
    return w


def least_squares(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.linalg.lstsq(X, y, rcond=None)[0]


def synthetic_regression(n_clients: int, samples: int, dim: int, rng: np.random.Generator,
                         noise: float = 0.5, shift: float = 0.0):
    """IID linear-regression shards (bias column included) plus the true weights."""
    w_true = rng.normal(size=dim + 1)
    shards = []
    for _ in range(n_clients):
        X = np.hstack([rng.normal(loc=shift, size=(samples, dim)), np.ones((samples, 1))])
        y = X @ w_true + rng.normal(scale=noise, size=samples)
        shards.append((X, y))
    return shards, w_true


# -- protocol ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GlobalModel:
    round: int
    weights: np.ndarray


@dataclass(frozen=True, eq=False)
class UpdateMsg:
    update: LocalUpdate
    local_loss: float


@dataclass
class FlConfig:
    local_steps: int = 5
    lr: float = 0.05
    model_bits: float = 32.0 * 64
    round_timeout: SimTime = 60 * SECOND
    steps_override: dict = field(default_factory=dict)    # NodeId -> local steps


@dataclass(frozen=True)
class FlRoundLog:
    round: int
    participants: tuple
    local_losses: tuple
    global_loss: float
    started: SimTime
    finished: SimTime


class FederatedCoordinator:
    """AI-Node side of federated training over the gNBs.

    The global model is broadcast as simulator messages, each participant
    trains locally on its own shard when the broadcast arrives, and the
    update travels back over the participant's AI bearer when one is given.
    """

    def __init__(self, sim: Simulator, datasets: dict[NodeId, tuple[np.ndarray, np.ndarray]],
                 config: FlConfig | None = None, bearers: dict[NodeId, BearerLink] | None = None,
                 eval_set: tuple[np.ndarray, np.ndarray] | None = None):
        self.sim = sim
        self.datasets = datasets
        self.config = config or FlConfig()
        self.bearers = bearers or {}
        if eval_set is None:
            eval_set = (np.vstack([d[0] for _, d in sorted(datasets.items())]),
                        np.concatenate([d[1] for _, d in sorted(datasets.items())]))
        self.eval_set = eval_set
        self.round = 0
        self.log: list[FlRoundLog] = []
        self._pending: dict[NodeId, UpdateMsg] = {}
        self._expected: set[NodeId] = set()
        sim.on(GlobalModel, self._on_global)
        sim.on(UpdateMsg, self._on_update)

    def local_train(self, client: NodeId, w: np.ndarray, rnd: int) -> UpdateMsg:
        X, y = self.datasets[client]
        steps = self.config.steps_override.get(client, self.config.local_steps)
        w_local = gd_steps(w, X, y, steps, self.config.lr)
        return UpdateMsg(LocalUpdate(client, rnd, w_local, len(y)), mse(w_local, X, y))

    def _on_global(self, sim: Simulator, event) -> None:
        msg: GlobalModel = event.payload
        client = event.dst
        reply = self.local_train(client, msg.weights, msg.round)
        link = self.bearers.get(client)
        if link is not None:
            link.submit(AI_NODE, reply, self.config.model_bits, AiPayload.MODEL)
        else:
            sim.send(client, AI_NODE, reply, self.config.model_bits)

    def _on_update(self, sim: Simulator, event) -> None:
        msg: UpdateMsg = event.payload
        if msg.update.round == self.round and msg.update.client in self._expected:
            self._pending[msg.update.client] = msg
        else:
            sim.drop("stale_fl_update")

    def run_fl_round(self, participants: Sequence[NodeId], global_w: np.ndarray) -> np.ndarray:
        if not participants:
            raise NoParticipants("an FL round needs at least one participant")
        self.round += 1
        started = self.sim.clock
        self._expected = set(participants)
        self._pending = {}
        for p in participants:
            self.sim.send(AI_NODE, p, GlobalModel(self.round, np.asarray(global_w, dtype=np.float64)),
                          self.config.model_bits)
        done = self.sim.run_while(lambda: len(self._pending) < len(self._expected),
                                  started + self.config.round_timeout)
        got = [self._pending[p] for p in sorted(self._pending)]
        if not got:
            self.sim.metrics.count("fl.empty_rounds")
            return np.asarray(global_w, dtype=np.float64)
        if not done:
            self.sim.metrics.count("fl.late_participants", len(self._expected) - len(got))
        new_w = fed_aggregate([m.update for m in got])
        gloss = mse(new_w, *self.eval_set)
        self.log.append(FlRoundLog(self.round, tuple(str(m.update.client) for m in got),
                                   tuple(m.local_loss for m in got), gloss, started, self.sim.clock))
        self.sim.metrics.series(self.sim.clock, "fl.global_loss", gloss)
        return new_w


def select_participants(candidates: Sequence[ComputeCapability], round_size: int,
                        value_scores: dict[NodeId, float]) -> list[NodeId]:
    """Top ``round_size`` nodes by value score; ties go to the lower node index."""
    if round_size < 1:
        raise ValueError("round_size must be at least 1")
    ranked = sorted(candidates, key=lambda c: (-value_scores.get(c.node, 0.0), c.node.index, c.node.kind))
    return [c.node for c in ranked[:round_size]]


# -- fine-tuning ---------------------------------------------------------------

def records_to_xy(records: Sequence[DataRecord], features: Sequence[str], target: str):
    X = np.array([[r.attrs[f] for f in features] + [1.0] for r in records], dtype=np.float64)
    y = np.array([r.attrs[target] for r in records], dtype=np.float64)
    return X, y


def fine_tune(global_w: np.ndarray, local_data: Sequence[DataRecord], steps: int,
              features: Sequence[str], target: str, lr: float = 0.05, margin: float = 0.02,
              val_fraction: float = 0.25) -> tuple[np.ndarray, np.ndarray | None]:
    """Adapt ``global_w`` to local data; return ``(local weights, delta or None)``.

    The tail ``val_fraction`` of ``local_data`` is held out. The delta is only
    sent back when it lowers the held-out loss by more than ``margin``
    (relative to the global model's loss).
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    global_w = np.asarray(global_w, dtype=np.float64)
    if steps == 0 or not local_data:
        return global_w.copy(), None
    X, y = records_to_xy(local_data, features, target)
    n_val = max(1, int(round(len(y) * val_fraction)))
    if n_val >= len(y):
        n_val = len(y) // 2
    Xt, yt, Xv, yv = X[:-n_val], y[:-n_val], X[-n_val:], y[-n_val:]
    local = gd_steps(global_w, Xt, yt, steps, lr)
    g_loss, l_loss = mse(global_w, Xv, yv), mse(local, Xv, yv)
    if g_loss > 0 and (g_loss - l_loss) / g_loss > margin:
        return local, local - global_w
    return local, None
