"""Adapters that pull records from outside the RAN (application servers, core, OAM)."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping

from .schema import DataRecord, Schema


class Domain(enum.Enum):
    APP_SERVER = "APP_SERVER"
    CORE = "CORE"
    OAM = "OAM"


class SourceUnavailable(LookupError):
    pass


@dataclass
class SourceAdapter:
    """``rows`` yields mappings with optional ``time``/``ue``/``gnb`` keys plus attributes."""

    domain: Domain
    schema: Schema
    rows: Callable[[], Iterable[Mapping[str, Any]]]


class CrossDomainCollector:
    def __init__(self, adapters: Iterable[SourceAdapter] = ()):
        self.adapters = {a.domain: a for a in adapters}

    def configure(self, adapter: SourceAdapter) -> None:
        self.adapters[adapter.domain] = adapter

    def collect(self, source: Domain, attributes: Iterable[str]) -> list[DataRecord]:
        adapter = self.adapters.get(source)
        if adapter is None:
            raise SourceUnavailable(f"no {source.value} adapter configured")
        names = list(attributes)
        adapter.schema.require(names)
        out = []
        for row in adapter.rows():
            attrs = {n: row[n] for n in names if n in row}
            out.append(DataRecord(row.get("gnb"), int(row.get("time", 0)), attrs, row.get("ue"),
                                  domain=source.value))
        return out


def collect_cross_domain(collector: CrossDomainCollector, source: Domain,
                         attributes: Iterable[str]) -> list[DataRecord]:
    return collector.collect(source, attributes)


def scripted_app_server(trace: Iterable[Mapping[str, Any]]) -> SourceAdapter:
    """APP_SERVER adapter replaying a fixed QoE trace (e.g. time-to-first-token in ms)."""
    rows = [dict(r) for r in trace]
    schema = Schema({"ttft": "number", "app_type": "string", "throughput": "number", "latency": "number"})
    return SourceAdapter(Domain.APP_SERVER, schema, lambda: iter(rows))
