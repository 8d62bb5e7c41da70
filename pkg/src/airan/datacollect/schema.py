from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping

from ..simcore import NodeId, SimTime


class AttrType(enum.Enum):
    NUMBER = "number"
    STRING = "string"
    BOOLEAN = "boolean"

    def accepts(self, value: Any) -> bool:
        if self is AttrType.BOOLEAN:
            return isinstance(value, bool)
        if self is AttrType.NUMBER:
            return isinstance(value, (int, float)) and not isinstance(value, bool)
        return isinstance(value, str)


class UnknownField(LookupError):
    def __init__(self, name: str):
        super().__init__(f"unknown attribute {name!r}")
        self.name = name


class SchemaViolation(ValueError):
    pass


class Schema:
    """Declared attribute names and their value types."""

    def __init__(self, attributes: Mapping[str, AttrType | str]):
        self.attributes: dict[str, AttrType] = {
            name: t if isinstance(t, AttrType) else AttrType(t) for name, t in attributes.items()
        }

    def __contains__(self, name: str) -> bool:
        return name in self.attributes

    def __eq__(self, other):
        return isinstance(other, Schema) and self.attributes == other.attributes

    def type_of(self, name: str) -> AttrType:
        try:
            return self.attributes[name]
        except KeyError:
            raise UnknownField(name) from None

    def require(self, names) -> None:
        for n in names:
            self.type_of(n)

    def validate(self, attrs: Mapping[str, Any]) -> None:
        for name, value in attrs.items():
            t = self.type_of(name)
            if not t.accepts(value):
                raise SchemaViolation(f"{name}={value!r} is not a {t.value}")
        util = attrs.get("prb_util")
        if util is not None and not 0.0 <= util <= 1.0:
            raise SchemaViolation(f"prb_util={util} outside [0, 1]")

    def to_dict(self) -> dict[str, str]:
        return {n: t.value for n, t in self.attributes.items()}

    def extended(self, extra: Mapping[str, AttrType | str]) -> "Schema":
        merged: dict[str, AttrType | str] = dict(self.attributes)
        merged.update(extra)
        return Schema(merged)


DEFAULT_SCHEMA = Schema({
    "velocity": AttrType.NUMBER,      # km/h
    "rsrp": AttrType.NUMBER,          # dBm
    "sinr": AttrType.NUMBER,          # dB
    "prb_util": AttrType.NUMBER,      # fraction
    "throughput": AttrType.NUMBER,    # bit/s
    "latency": AttrType.NUMBER,       # ms
    "tcp_rtt": AttrType.NUMBER,       # ms
    "packet_loss": AttrType.NUMBER,   # fraction
    "handover_failures": AttrType.NUMBER,
    "position_x": AttrType.NUMBER,    # m
    "position_y": AttrType.NUMBER,    # m
    "five_qi": AttrType.NUMBER,
    "ttft": AttrType.NUMBER,          # ms
    "app_type": AttrType.STRING,
    "device_class": AttrType.STRING,
    "battery_low": AttrType.BOOLEAN,
    "vip": AttrType.BOOLEAN,
})


@dataclass
class DataRecord:
    gnb: NodeId | None
    time: SimTime
    attrs: dict[str, Any] = field(default_factory=dict)
    ue: NodeId | None = None
    domain: str = "RAN"

    def get(self, name: str, default=None):
        return self.attrs.get(name, default)

    def project(self, names) -> "DataRecord":
        return DataRecord(self.gnb, self.time, {n: self.attrs[n] for n in names if n in self.attrs},
                          self.ue, self.domain)


_HEADER_BITS = 64


def record_bits(attrs: Mapping[str, Any]) -> int:
    """Wire size of a report carrying ``attrs``."""
    bits = _HEADER_BITS
    for value in attrs.values():
        if isinstance(value, bool):
            bits += 8
        elif isinstance(value, str):
            bits += 8 * len(value.encode())
        else:
            bits += 32
    return bits
