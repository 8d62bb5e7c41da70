"""Compute capability registration, offload decisions and pooled deadline scheduling."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..simcore import NodeId, SECOND, SimTime


class TaskKind(enum.Enum):
    TRAINING = "TRAINING"
    INFERENCE = "INFERENCE"
    FINE_TUNE = "FINE_TUNE"


@dataclass(frozen=True)
class ComputeCapability:
    node: NodeId
    capacity: float                 # compute units per second
    memory: float = 0.0             # bits
    tags: frozenset = frozenset()   # zone / hardware class / service need

    def __post_init__(self):
        if not self.capacity > 0:
            raise ValueError("capacity must be positive")


@dataclass(frozen=True)
class ComputeTask:
    task_id: str
    kind: TaskKind
    demand: float                   # compute units
    deadline: SimTime
    priority: int = 0
    origin: NodeId | None = None
    required_tags: frozenset = frozenset()
    submitted: SimTime = 0

    def __post_init__(self):
        if not self.demand > 0:
            raise ValueError("demand must be positive")
        if not self.deadline > self.submitted:
            raise ValueError("deadline must be after submission")


class ComputeRegistry:
    """Capabilities registered by gNBs and the AI Node, grouped into pools by tag."""

    def __init__(self):
        self.capabilities: dict[NodeId, ComputeCapability] = {}

    def register(self, cap: ComputeCapability) -> None:
        self.capabilities[cap.node] = cap

    def pool(self, *tags: str) -> list[ComputeCapability]:
        want = frozenset(tags)
        return [c for n, c in sorted(self.capabilities.items()) if want <= c.tags]


class Offload(enum.Enum):
    LOCAL = "LOCAL"
    OFFLOAD = "OFFLOAD"
    REJECT = "REJECT"


def decide_offload(local_queue_delay: SimTime, remote_rtt: SimTime, remote_queue_delay: SimTime,
                   deadline: SimTime) -> Offload:
    if min(local_queue_delay, remote_rtt, remote_queue_delay, deadline) < 0:
        raise ValueError("delays must be non-negative")
    if local_queue_delay <= deadline:
        return Offload.LOCAL
    if remote_rtt + remote_queue_delay <= deadline:
        return Offload.OFFLOAD
    return Offload.REJECT


class Rejection(enum.Enum):
    CAPACITY_EXCEEDED = "CapacityExceeded"
    NO_MATCHING_NODE = "NoMatchingNode"


@dataclass
class PoolSchedule:
    assignments: dict[str, NodeId] = field(default_factory=dict)
    finish: dict[str, float] = field(default_factory=dict)
    rejections: dict[str, Rejection] = field(default_factory=dict)
    load: dict[NodeId, float] = field(default_factory=dict)
    budget: dict[NodeId, float] = field(default_factory=dict)


def schedule_pool(tasks: list[ComputeTask], pool: list[ComputeCapability], now: SimTime,
                  epoch: SimTime = SECOND) -> PoolSchedule:
    """Assign tasks in descending priority tiers, earliest deadline first inside a tier.

    Each node runs its tasks in assignment order, so a task finishes at
    ``now + cumulative demand / capacity``. A task goes to the least-utilised
    node whose tags match, that has room within one ``epoch`` of capacity and
    that finishes it by its deadline; otherwise it is rejected.
    """
    out = PoolSchedule()
    for c in pool:
        out.load[c.node] = 0.0
        out.budget[c.node] = c.capacity * epoch / SECOND
    caps = sorted(pool, key=lambda c: c.node)
    for task in sorted(tasks, key=lambda t: (-t.priority, t.deadline, t.task_id)):
        matching = [c for c in caps if task.required_tags <= c.tags]
        if not matching:
            out.rejections[task.task_id] = Rejection.NO_MATCHING_NODE
            continue
        best, best_key, best_finish = None, None, 0.0
        for c in matching:
            load = out.load[c.node]
            if load + task.demand > out.budget[c.node]:
                continue
            finish = now + (load + task.demand) * SECOND / c.capacity
            if finish > task.deadline:
                continue
            key = (load / out.budget[c.node], c.node)
            if best_key is None or key < best_key:
                best, best_key, best_finish = c, key, finish
        if best is None:
            out.rejections[task.task_id] = Rejection.CAPACITY_EXCEEDED
            continue
        out.load[best.node] += task.demand
        out.assignments[task.task_id] = best.node
        out.finish[task.task_id] = best_finish
    return out
