"""Payload variants carried by simulator events."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .topology import NodeId


@dataclass(frozen=True)
class Timer:
    name: str
    data: Any = None


@dataclass(frozen=True)
class TrafficArrival:
    ue: NodeId
    app: str
    bits: float
    noise: float = 1.0


@dataclass(frozen=True)
class CollectionReport:
    task_id: str
    records: tuple
    generated_at: int
    bits: float
    batch: bool = False


@dataclass(frozen=True)
class ModelCommand:
    model_id: str
    version: int
    command: str
    data: Any = None


@dataclass(frozen=True)
class ComputeRequest:
    task: Any


@dataclass(frozen=True)
class Handover:
    ue: NodeId
    from_gnb: NodeId
    to_gnb: NodeId
