"""AI radio bearer: AI payloads ride below basic connectivity and under a share cap."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable

from ..simcore import NodeId, SECOND, SimTime, Simulator


class AiPayload(enum.Enum):
    TRAINING_DATA = "TRAINING_DATA"
    MODEL = "MODEL"
    ASSIST_DATA = "ASSIST_DATA"


class Admission(enum.Enum):
    SEND = "SEND"
    DEFER = "DEFER"


class PayloadNotAllowed(ValueError):
    pass


@dataclass
class AiBearer:
    """Per-link AI bearer state for the current admission epoch.

    ``capacity_bps * epoch`` is the link volume of one epoch; the AI share is
    the fraction of it already used by admitted AI bits.
    """

    owner: NodeId
    capacity_bps: float
    cap_fraction: float = 0.2
    epoch: SimTime = 100_000
    allowed: frozenset = frozenset(AiPayload)
    ai_bits: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.cap_fraction < 1.0:
            raise ValueError("cap_fraction must lie in (0, 1)")
        if not self.capacity_bps > 0 or not self.epoch > 0:
            raise ValueError("capacity and epoch must be positive")

    @property
    def epoch_bits(self) -> float:
        return self.capacity_bps * self.epoch / SECOND

    def share_after(self, pending_bits: float) -> float:
        return (self.ai_bits + pending_bits) / self.epoch_bits

    @property
    def share(self) -> float:
        return self.ai_bits / self.epoch_bits

    def new_epoch(self) -> None:
        self.ai_bits = 0.0


def admit_ai_traffic(bearer: AiBearer, pending_bits: float, link_load: float,
                     payload: AiPayload = AiPayload.TRAINING_DATA) -> Admission:
    """SEND iff the AI share stays within the cap and basic load plus AI share fits the link."""
    if not 0.0 <= link_load <= 1.0:
        raise ValueError("link_load must lie in [0, 1]")
    if pending_bits < 0:
        raise ValueError("pending_bits must be non-negative")
    if payload not in bearer.allowed:
        raise PayloadNotAllowed(payload.value)
    share = bearer.share_after(pending_bits)
    if share <= bearer.cap_fraction and link_load + share <= 1.0:
        return Admission.SEND
    return Admission.DEFER


@dataclass(frozen=True)
class _EpochTick:
    owner: NodeId


@dataclass
class _Transfer:
    dst: NodeId
    payload: Any
    bits: float
    kind: AiPayload
    remaining: float = 0.0
    on_sent: Callable[[SimTime], None] | None = None


@dataclass
class BearerLink:
    """Queue of AI transfers from one node, drained epoch by epoch through admission.

    Transfers larger than one epoch's allowance go out in chunks; the payload
    itself is delivered with the final chunk. ``audit`` records
    ``(epoch_start, ai_share, basic_load)`` for every epoch that carried AI bits.
    """

    sim: Simulator
    bearer: AiBearer
    basic_load: Callable[[SimTime], float]
    queue: deque = field(default_factory=deque)
    audit: list = field(default_factory=list)
    deferrals: int = 0
    _ticking: bool = False

    def __post_init__(self):
        self.sim.on(_EpochTick, _dispatch_tick)
        self.sim.services.setdefault("bearer_links", {})[self.bearer.owner] = self

    def submit(self, dst: NodeId, payload: Any, bits: float, kind: AiPayload = AiPayload.MODEL,
               on_sent: Callable[[SimTime], None] | None = None) -> None:
        if kind not in self.bearer.allowed:
            raise PayloadNotAllowed(kind.value)
        self.queue.append(_Transfer(dst, payload, bits, kind, bits, on_sent))
        if not self._ticking:
            self._ticking = True
            self.sim.at(self.sim.clock, _EpochTick(self.bearer.owner))

    def _epoch(self) -> None:
        self.bearer.new_epoch()
        load = float(self.basic_load(self.sim.clock))
        room = max(0.0, min(self.bearer.cap_fraction, 1.0 - load)) * self.bearer.epoch_bits
        while self.queue:
            tr = self.queue[0]
            chunk = min(tr.remaining, room - self.bearer.ai_bits)
            if chunk <= 0 or admit_ai_traffic(self.bearer, chunk, load, tr.kind) is Admission.DEFER:
                self.deferrals += 1
                break
            self.bearer.ai_bits += chunk
            tr.remaining -= chunk
            if tr.remaining > 0:
                self.deferrals += 1
                break
            self.queue.popleft()
            # volume was already paced through the epochs; only propagation delay remains
            due = self.sim.send(self.bearer.owner, tr.dst, tr.payload, 0.0)
            if tr.on_sent is not None:
                tr.on_sent(due)
        if self.bearer.ai_bits > 0:
            self.audit.append((self.sim.clock, self.bearer.share, load))
        if self.queue:
            self.sim.after(self.bearer.epoch, _EpochTick(self.bearer.owner))
        else:
            self._ticking = False


def _dispatch_tick(sim: Simulator, event) -> None:
    sim.services["bearer_links"][event.payload.owner]._epoch()
