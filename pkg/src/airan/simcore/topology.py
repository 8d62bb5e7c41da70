from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .time import MILLISECOND, SimTime


class NodeKind(enum.IntEnum):
    AI_NODE = 0
    GNB = 1
    UE = 2
    OAM = 3
    CORE = 4


@dataclass(frozen=True, order=True)
class NodeId:
    kind: NodeKind
    index: int = 0

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"node index must be non-negative, got {self.index}")

    def __str__(self):
        return f"{self.kind.name}{self.index}"

    @classmethod
    def parse(cls, text: str) -> "NodeId":
        for kind in sorted(NodeKind, key=lambda k: -len(k.name)):
            if text.startswith(kind.name):
                return cls(kind, int(text[len(kind.name):] or 0))
        raise ValueError(f"not a node id: {text!r}")


AI_NODE = NodeId(NodeKind.AI_NODE, 0)
OAM = NodeId(NodeKind.OAM, 0)
CORE = NodeId(NodeKind.CORE, 0)


def gnb(index: int) -> NodeId:
    return NodeId(NodeKind.GNB, index)


def ue(index: int) -> NodeId:
    return NodeId(NodeKind.UE, index)


class NoRoute(LookupError):
    """No link is configured between the two node kinds."""


def default_link_latency() -> dict[tuple[NodeKind, NodeKind], SimTime]:
    K = NodeKind
    return {
        (K.UE, K.GNB): 1 * MILLISECOND,
        (K.GNB, K.GNB): 1 * MILLISECOND,
        (K.GNB, K.AI_NODE): 2 * MILLISECOND,
        (K.GNB, K.OAM): 10 * MILLISECOND,
        (K.GNB, K.CORE): 5 * MILLISECOND,
        (K.AI_NODE, K.OAM): 5 * MILLISECOND,
        (K.AI_NODE, K.CORE): 2 * MILLISECOND,
        (K.OAM, K.CORE): 10 * MILLISECOND,
    }


def default_link_capacity() -> dict[NodeKind | NodeId, float]:
    K = NodeKind
    return {K.UE: 50e6, K.GNB: 1e9, K.AI_NODE: 10e9, K.OAM: 1e9, K.CORE: 10e9}


@dataclass
class Topology:
    """One AI Node and one OAM over ``gnb_count`` gNBs with ``ues_per_gnb`` UEs each.

    ``link_latency`` is keyed by unordered node-kind pairs. ``link_capacity``
    (bits per second) may be keyed by a specific ``NodeId`` or by a whole
    ``NodeKind``; the node-specific entry wins.
    """

    gnb_count: int = 8
    ues_per_gnb: int = 600
    link_latency: dict = field(default_factory=default_link_latency)
    link_capacity: dict = field(default_factory=default_link_capacity)

    def __post_init__(self):
        if self.gnb_count <= 0 or self.ues_per_gnb <= 0:
            raise ValueError("gnb_count and ues_per_gnb must be positive")
        for pair, lat in self.link_latency.items():
            if lat < 0:
                raise ValueError(f"negative latency on {pair}")
        for key, cap in self.link_capacity.items():
            if not cap > 0:
                raise ValueError(f"capacity of {key} must be positive")
        self._attached = np.arange(self.ue_count, dtype=np.int64) // self.ues_per_gnb

    @property
    def ue_count(self) -> int:
        return self.gnb_count * self.ues_per_gnb

    def nodes(self) -> list[NodeId]:
        out = [AI_NODE, OAM, CORE]
        out += [gnb(i) for i in range(self.gnb_count)]
        out += [ue(i) for i in range(self.ue_count)]
        return out

    def has_node(self, node: NodeId) -> bool:
        if node.kind is NodeKind.GNB:
            return node.index < self.gnb_count
        if node.kind is NodeKind.UE:
            return node.index < self.ue_count
        return node.index == 0

    def latency(self, a: NodeKind, b: NodeKind) -> SimTime:
        lat = self.link_latency.get((a, b))
        if lat is None:
            lat = self.link_latency.get((b, a))
        if lat is None:
            raise NoRoute(f"no link between {a.name} and {b.name}")
        return lat

    def has_link(self, a: NodeKind, b: NodeKind) -> bool:
        return (a, b) in self.link_latency or (b, a) in self.link_latency

    def capacity(self, node: NodeId) -> float:
        cap = self.link_capacity.get(node)
        if cap is None:
            cap = self.link_capacity[node.kind]
        return cap

    def serving_gnb(self, u: NodeId) -> NodeId:
        return gnb(int(self._attached[u.index]))

    def attach(self, u: NodeId, g: NodeId) -> None:
        if not self.has_node(g) or g.kind is not NodeKind.GNB:
            raise ValueError(f"{g} is not a gNB of this topology")
        self._attached[u.index] = g.index

    def ues_of(self, g: NodeId) -> list[NodeId]:
        return [ue(int(i)) for i in np.flatnonzero(self._attached == g.index)]
