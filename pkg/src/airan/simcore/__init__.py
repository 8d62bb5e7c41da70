"""Deterministic discrete-event engine, topology and message transport."""
from .engine import Event, MetricsDigest, MetricsSink, PastDue, Simulator, node_rng, stable_repr
from .messages import CollectionReport, ComputeRequest, Handover, ModelCommand, Timer, TrafficArrival
from .time import DAY, HOUR, MICROSECOND, MILLISECOND, MINUTE, SECOND, SimTime, minutes, ms, seconds
from .topology import AI_NODE, CORE, OAM, NodeId, NodeKind, NoRoute, Topology, gnb, ue

__all__ = [
    "AI_NODE", "CORE", "OAM", "DAY", "HOUR", "MICROSECOND", "MILLISECOND", "MINUTE", "SECOND",
    "CollectionReport", "ComputeRequest", "Event", "Handover", "MetricsDigest", "MetricsSink",
    "ModelCommand", "NoRoute", "NodeId", "NodeKind", "PastDue", "SimTime", "Simulator", "Timer",
    "Topology", "TrafficArrival", "gnb", "minutes", "ms", "node_rng", "seconds", "stable_repr", "ue",
]
