"""50 m grid binning and per-grid metric summaries."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from ..datacollect import DataRecord

GRID_SIZE = 50.0


class OutOfDomain(ValueError):
    pass


@dataclass(frozen=True, order=True)
class GridIndex:
    ix: int
    iy: int


def grid_index(x: float, y: float, size: float = GRID_SIZE) -> GridIndex:
    if x < 0 or y < 0:
        raise OutOfDomain(f"coordinates must be non-negative, got ({x}, {y})")
    return GridIndex(int(math.floor(x / size)), int(math.floor(y / size)))


@dataclass(frozen=True)
class GridSummary:
    mean_rtt: float
    mean_rsrp: float
    mean_sinr: float
    n: int


def _attrs(rec: DataRecord | Mapping[str, Any]) -> Mapping[str, Any]:
    return rec.attrs if isinstance(rec, DataRecord) else rec


def aggregate_grid(records: Iterable[DataRecord | Mapping[str, Any]],
                   size: float = GRID_SIZE) -> dict[GridIndex, GridSummary]:
    """Mean TCP RTT, RSRP and SINR per grid cell; empty cells are absent.

    Sums use ``math.fsum`` so the result does not depend on record order.
    """
    acc: dict[GridIndex, tuple[list, list, list]] = {}
    for rec in records:
        a = _attrs(rec)
        g = grid_index(a["position_x"], a["position_y"], size)
        rtt, rsrp, sinr = acc.setdefault(g, ([], [], []))
        rtt.append(a["tcp_rtt"])
        rsrp.append(a["rsrp"])
        sinr.append(a["sinr"])
    out = {}
    for g in sorted(acc):
        rtt, rsrp, sinr = acc[g]
        n = len(rtt)
        out[g] = GridSummary(math.fsum(rtt) / n, math.fsum(rsrp) / n, math.fsum(sinr) / n, n)
    return out


def grid_rows(summary: Mapping[GridIndex, GridSummary]) -> list[dict[str, Any]]:
    return [{"ix": g.ix, "iy": g.iy, "mean_rtt": s.mean_rtt, "mean_rsrp": s.mean_rsrp,
             "mean_sinr": s.mean_sinr, "n": s.n} for g, s in sorted(summary.items())]
