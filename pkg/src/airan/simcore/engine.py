from __future__ import annotations

import dataclasses
import enum
import hashlib
import heapq
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .time import SimTime
from .topology import NodeId, Topology

log = logging.getLogger(__name__)


class PastDue(ValueError):
    """An event was scheduled before the current clock."""


def stable_repr(obj: Any) -> str:
    """Text form of ``obj`` that is identical across runs and processes."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return repr(obj)
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, enum.Enum):
        return f"{type(obj).__name__}.{obj.name}"
    if isinstance(obj, NodeId):
        return str(obj)
    if isinstance(obj, np.ndarray):
        h = hashlib.sha256(np.ascontiguousarray(obj).tobytes()).hexdigest()[:16]
        return f"nd[{obj.dtype},{obj.shape},{h}]"
    if isinstance(obj, np.generic):
        return repr(obj.item())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        inner = ",".join(f"{f.name}={stable_repr(getattr(obj, f.name))}"
                         for f in dataclasses.fields(obj) if f.compare)
        return f"{type(obj).__name__}({inner})"
    if isinstance(obj, dict):
        return "{" + ",".join(f"{stable_repr(k)}:{stable_repr(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(stable_repr(v) for v in obj) + "]"
    if isinstance(obj, (set, frozenset)):
        return "{" + ",".join(sorted(stable_repr(v) for v in obj)) + "}"
    return repr(obj)


def node_rng(root_seed: int, node: NodeId, stream: int = 0) -> np.random.Generator:
    """Independent generator for ``node``; unaffected by which other nodes exist."""
    return np.random.default_rng([int(root_seed), int(stream), int(node.kind), int(node.index)])


@dataclass(frozen=True)
class Event:
    due: SimTime
    seq: int
    src: NodeId | None
    dst: NodeId | None
    payload: Any
    message: bool = False
    size_bits: float = 0.0

    @property
    def key(self) -> tuple[int, int]:
        return (self.due, self.seq)


@dataclass
class MetricsDigest:
    run_id: str
    kpis: dict[str, Any]
    hash: str

    def to_dict(self) -> dict[str, Any]:
        return {"run_id": self.run_id, "hash": self.hash, "kpis": self.kpis}


class MetricsSink:
    """Append-only KPI store; every record also feeds the run's content hash."""

    def __init__(self, hasher):
        self._hasher = hasher
        self.counters: dict[str, float] = {}
        self.observations: dict[str, list[float]] = defaultdict(list)
        self.rows: list[tuple[SimTime, str, float]] = []
        self.gauges: dict[str, Any] = {}

    def _feed(self, text: str) -> None:
        self._hasher.update(text.encode())
        self._hasher.update(b"\n")

    def count(self, name: str, n: float = 1) -> None:
        self.counters[name] = self.counters.get(name, 0) + n
        self._feed(f"C|{name}|{n!r}")

    def observe(self, name: str, value: float) -> None:
        self.observations[name].append(float(value))
        self._feed(f"O|{name}|{float(value)!r}")

    def series(self, t: SimTime, name: str, value: float) -> None:
        self.rows.append((t, name, float(value)))
        self.observe(name, value)

    def gauge(self, name: str, value: Any) -> None:
        """Set a run-level result (e.g. a post-run evaluation); last write wins."""
        self.gauges[name] = value
        self._feed(f"G|{name}|{stable_repr(value)}")

    def note(self, text: str) -> None:
        """Hash an event effect that is not a KPI (e.g. an applied action)."""
        self._feed(f"N|{text}")

    def summary(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for name in sorted(self.counters):
            out[name] = self.counters[name]
        for name in sorted(self.observations):
            vals = np.asarray(self.observations[name])
            out[f"{name}.n"] = int(vals.size)
            out[f"{name}.mean"] = float(vals.mean())
            out[f"{name}.p50"] = float(np.percentile(vals, 50))
            out[f"{name}.p95"] = float(np.percentile(vals, 95))
            out[f"{name}.max"] = float(vals.max())
        for name in sorted(self.gauges):
            out[name] = self.gauges[name]
        return out


Handler = Callable[["Simulator", Event], None]


class Simulator:
    """Single-threaded discrete-event loop ordered by ``(due, seq)``.

    Handlers are registered per payload type. Messages created by
    :meth:`send` are counted so that ``sent == delivered + dropped`` once the
    run is closed.
    """

    def __init__(self, topology: Topology | None = None, seed: int = 0, run_id: str = "run"):
        self.topology = topology if topology is not None else Topology()
        self.seed = seed
        self.run_id = run_id
        self.clock: SimTime = 0
        self._queue: list[tuple[int, int, Event]] = []
        self._seq = 0
        self._handlers: dict[type, Handler] = {}
        self._hasher = hashlib.sha256()
        self.metrics = MetricsSink(self._hasher)
        self.sent = 0
        self.delivered = 0
        self.dropped: dict[str, int] = {}
        self.processed = 0
        self.trace: list[tuple[SimTime, int]] | None = None
        self.services: dict[str, Any] = {}

    def on(self, payload_type: type, handler: Handler) -> None:
        self._handlers[payload_type] = handler

    def rng(self, node: NodeId, stream: int = 0) -> np.random.Generator:
        return node_rng(self.seed, node, stream)

    def schedule(self, event: Event) -> Event:
        if event.due < self.clock:
            raise PastDue(f"event due at {event.due} but clock is {self.clock}")
        event = dataclasses.replace(event, seq=self._seq)
        self._seq += 1
        heapq.heappush(self._queue, (event.due, event.seq, event))
        return event

    def at(self, due: SimTime, payload: Any, src: NodeId | None = None,
           dst: NodeId | None = None) -> Event:
        return self.schedule(Event(due, -1, src, dst, payload))

    def after(self, delay: SimTime, payload: Any, src: NodeId | None = None,
              dst: NodeId | None = None) -> Event:
        return self.at(self.clock + delay, payload, src, dst)

    def delivery_time(self, src: NodeId, dst: NodeId, size_bits: float = 0.0) -> SimTime:
        lat = self.topology.latency(src.kind, dst.kind)
        serial = int(round(size_bits * 1_000_000 / self.topology.capacity(src)))
        return self.clock + lat + serial

    def send(self, src: NodeId, dst: NodeId, payload: Any, size_bits: float = 0.0) -> SimTime:
        if src == dst:
            raise ValueError("src and dst must differ")
        if size_bits < 0:
            raise ValueError("size_bits must be non-negative")
        due = self.delivery_time(src, dst, size_bits)
        self.schedule(Event(due, -1, src, dst, payload, message=True, size_bits=size_bits))
        self.sent += 1
        return due

    def drop(self, reason: str, n: int = 1) -> None:
        self.dropped[reason] = self.dropped.get(reason, 0) + n
        self.metrics.note(f"drop|{reason}|{n}")

    @property
    def pending(self) -> int:
        return len(self._queue)

    @property
    def in_flight(self) -> int:
        return sum(1 for _, _, e in self._queue if e.message)

    def peek(self) -> SimTime | None:
        return self._queue[0][0] if self._queue else None

    def step(self) -> Event:
        due, _, event = heapq.heappop(self._queue)
        self.clock = due
        self.processed += 1
        if self.trace is not None:
            self.trace.append(event.key)
        self._hasher.update(
            f"E|{event.due}|{event.seq}|{event.src}|{event.dst}|{stable_repr(event.payload)}\n".encode())
        handler = self._handlers.get(type(event.payload))
        if handler is None:
            if event.message:
                self.drop("no_handler")
            return event
        if event.message:
            self.delivered += 1
        handler(self, event)
        return event

    def run(self, until: SimTime) -> MetricsDigest:
        while self._queue and self._queue[0][0] <= until:
            self.step()
        return self.digest()

    def run_while(self, condition: Callable[[], bool], until: SimTime) -> bool:
        """Process events while ``condition()`` holds; False if the horizon was hit first."""
        while condition():
            if not self._queue or self._queue[0][0] > until:
                return False
            self.step()
        return True

    def close(self, reason: str = "horizon") -> None:
        """Discard everything still queued, recording undelivered messages as drops."""
        n = self.in_flight
        if n:
            self.drop(reason, n)
        self._queue.clear()

    def kpis(self) -> dict[str, Any]:
        out = self.metrics.summary()
        if self.sent or self.dropped:
            out["messages.sent"] = self.sent
            out["messages.delivered"] = self.delivered
            out["messages.dropped"] = sum(self.dropped.values())
            out["messages.in_flight"] = self.in_flight
            for reason in sorted(self.dropped):
                out[f"messages.dropped.{reason}"] = self.dropped[reason]
        return out

    def digest(self) -> MetricsDigest:
        return MetricsDigest(self.run_id, self.kpis(), self._hasher.copy().hexdigest())
