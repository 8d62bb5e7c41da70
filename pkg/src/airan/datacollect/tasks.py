"""Collection tasks and the source-side collection service."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

from ..simcore import (CollectionReport, MINUTE, MILLISECOND, NodeId, NodeKind, SECOND, SimTime,
                       Simulator)
from .filters import FilterExpr, check_types, compile_filter, parse_filter
from .schema import DataRecord, Schema, record_bits


class DeadlineClass(enum.Enum):
    REAL_TIME = "REAL_TIME"
    NEAR_RT = "NEAR_RT"
    OAM = "OAM"

    @property
    def bound(self) -> SimTime:
        return _BOUNDS[self]

    @property
    def report_period(self) -> SimTime:
        """Interval over which the volume budget is counted (and batches flushed)."""
        return _PERIODS[self]


_BOUNDS = {DeadlineClass.REAL_TIME: 10 * MILLISECOND, DeadlineClass.NEAR_RT: SECOND,
           DeadlineClass.OAM: 15 * MINUTE}
_PERIODS = {DeadlineClass.REAL_TIME: SECOND, DeadlineClass.NEAR_RT: SECOND,
            DeadlineClass.OAM: 15 * MINUTE}


class BudgetInvalid(ValueError):
    pass


class UnreachableDestination(ValueError):
    pass


@dataclass(frozen=True)
class Scope:
    cells: frozenset[int] | None = None
    ues: frozenset[int] | None = None
    service_type: str | None = None
    area: tuple[float, float, float, float] | None = None     # x0, y0, x1, y1 in metres
    time_range: tuple[SimTime, SimTime] | None = None

    def matches(self, rec: DataRecord) -> bool:
        if self.cells is not None and (rec.gnb is None or rec.gnb.index not in self.cells):
            return False
        if self.ues is not None and (rec.ue is None or rec.ue.index not in self.ues):
            return False
        if self.service_type is not None and rec.attrs.get("app_type") != self.service_type:
            return False
        if self.area is not None:
            x, y = rec.attrs.get("position_x"), rec.attrs.get("position_y")
            x0, y0, x1, y1 = self.area
            if x is None or y is None or not (x0 <= x < x1 and y0 <= y < y1):
                return False
        if self.time_range is not None and not self.time_range[0] <= rec.time < self.time_range[1]:
            return False
        return True


@dataclass
class CollectionTask:
    task_id: str
    attributes: frozenset[str]
    deadline_class: DeadlineClass
    destination: NodeId
    volume_budget: float
    filter: FilterExpr | str | None = None
    scope: Scope = field(default_factory=Scope)


@dataclass
class TaskStats:
    generated: int = 0
    matched: int = 0
    delivered: int = 0
    dropped_budget: int = 0
    deadline_misses: int = 0
    batches: int = 0


@dataclass(frozen=True)
class _FlushTick:
    task_id: str


@dataclass
class _Installed:
    task: CollectionTask
    predicate: Any
    stats: TaskStats = field(default_factory=TaskStats)
    buffer: list = field(default_factory=list)          # (time, seq, source, record, bits)
    period_start: SimTime = 0
    period_bits: float = 0.0
    active: bool = True


class CollectionService:
    """Runs installed collection tasks against samples produced at gNBs.

    Filters are evaluated where the sample is generated; matching records are
    projected onto the requested attributes and shipped to the task's
    destination according to its deadline class. Every delivered report is
    kept in :attr:`delivered` and every budget period in :attr:`audit`.
    """

    def __init__(self, sim: Simulator, schema: Schema):
        self.sim = sim
        self.schema = schema
        self.tasks: dict[str, _Installed] = {}
        self.delivered: dict[str, list[DataRecord]] = {}
        self.deliveries: list[tuple[SimTime, str, int, SimTime]] = []   # (time, task, n, generated_at)
        self.flushes: list[tuple[SimTime, str, NodeId, int]] = []
        self.audit: list[tuple[str, SimTime, float]] = []               # (task, period start, bits)
        self._seq = 0
        sim.on(CollectionReport, self._on_report)
        sim.on(_FlushTick, self._on_flush)

    # -- install ---------------------------------------------------------
    def install_task(self, task: CollectionTask) -> str:
        if not task.volume_budget > 0:
            raise BudgetInvalid(f"task {task.task_id}: volume_budget must be positive")
        if task.task_id in self.tasks:
            raise ValueError(f"task {task.task_id} already installed")
        self.schema.require(task.attributes)
        expr = task.filter
        if isinstance(expr, str):
            expr = parse_filter(expr, self.schema)
        elif expr is not None:
            check_types(expr, self.schema)
        task.filter = expr
        self._check_destination(task)
        pred = compile_filter(expr) if expr is not None else None
        inst = _Installed(task, pred, period_start=self._period_of(task, self.sim.clock))
        self.tasks[task.task_id] = inst
        self.delivered[task.task_id] = []
        if task.deadline_class is not DeadlineClass.REAL_TIME:
            period = task.deadline_class.report_period
            first = (self.sim.clock // period + 1) * period
            self.sim.at(first, _FlushTick(task.task_id))
        return task.task_id

    def remove_task(self, task_id: str) -> None:
        self.tasks[task_id].active = False

    def _check_destination(self, task: CollectionTask) -> None:
        dest = task.destination
        topo = self.sim.topology
        if not topo.has_node(dest):
            raise UnreachableDestination(f"{dest} is not part of the topology")
        if task.deadline_class is DeadlineClass.REAL_TIME and dest.kind not in (NodeKind.GNB, NodeKind.AI_NODE):
            raise UnreachableDestination("REAL_TIME tasks must deliver to a GNB or the AI_NODE")
        if dest.kind is not NodeKind.GNB and not topo.has_link(NodeKind.GNB, dest.kind):
            raise UnreachableDestination(f"no route from gNBs to {dest.kind.name}")

    @staticmethod
    def _period_of(task: CollectionTask, t: SimTime) -> SimTime:
        p = task.deadline_class.report_period
        return (t // p) * p

    # -- sample path -------------------------------------------------------
    def on_sample(self, record: DataRecord) -> None:
        """Offer one freshly generated sample (at ``sim.clock``) to every task."""
        for inst in self.tasks.values():
            if not inst.active:
                continue
            inst.stats.generated += 1
            if not inst.task.scope.matches(record):
                continue
            if inst.predicate is not None and not inst.predicate(record.attrs):
                continue
            inst.stats.matched += 1
            out = record.project(sorted(inst.task.attributes))
            bits = record_bits(out.attrs)
            if inst.task.deadline_class is DeadlineClass.REAL_TIME:
                self._send_now(inst, record.gnb, out, bits)
            else:
                inst.buffer.append((record.time, self._seq, record.gnb, out, bits))
                self._seq += 1

    def _roll_period(self, inst: _Installed, t: SimTime) -> None:
        start = self._period_of(inst.task, t)
        if start != inst.period_start:
            self.audit.append((inst.task.task_id, inst.period_start, inst.period_bits))
            inst.period_start = start
            inst.period_bits = 0.0

    def _send_now(self, inst: _Installed, source: NodeId, rec: DataRecord, bits: float) -> None:
        self._roll_period(inst, self.sim.clock)
        if inst.period_bits + bits > inst.task.volume_budget:
            inst.stats.dropped_budget += 1
            self.sim.metrics.count(f"collect.{inst.task.task_id}.dropped_budget")
            return
        inst.period_bits += bits
        self._ship(inst, source, (rec,), bits, batch=False)

    def _ship(self, inst: _Installed, source: NodeId, records: tuple, bits: float, batch: bool) -> None:
        report = CollectionReport(inst.task.task_id, records, self.sim.clock, bits, batch)
        dest = inst.task.destination
        if source == dest:
            self.sim.at(self.sim.clock, report, source, dest)
        else:
            self.sim.send(source, dest, report, bits)

    def _on_flush(self, sim: Simulator, event) -> None:
        inst = self.tasks.get(event.payload.task_id)
        if inst is None or not inst.active:
            return
        period = inst.task.deadline_class.report_period
        sim.at(sim.clock + period, event.payload)
        self._roll_period(inst, sim.clock - 1)
        buf = sorted(inst.buffer, key=lambda r: (r[0], r[1]))
        inst.buffer = []
        keep = []
        for item in buf:
            if inst.period_bits + item[4] > inst.task.volume_budget:
                inst.stats.dropped_budget += 1
                sim.metrics.count(f"collect.{inst.task.task_id}.dropped_budget")
                continue
            inst.period_bits += item[4]
            keep.append(item)
        by_source: dict[NodeId, list] = {}
        for item in keep:
            by_source.setdefault(item[2], []).append(item)
        for source in sorted(by_source):
            items = by_source[source]
            self.flushes.append((sim.clock, inst.task.task_id, source, len(items)))
            inst.stats.batches += 1
            self._ship(inst, source, tuple(i[3] for i in items), sum(i[4] for i in items), batch=True)

    def _on_report(self, sim: Simulator, event) -> None:
        report: CollectionReport = event.payload
        inst = self.tasks.get(report.task_id)
        if inst is None:
            sim.drop("unknown_task")
            return
        self.delivered[report.task_id].extend(report.records)
        inst.stats.delivered += len(report.records)
        self.deliveries.append((sim.clock, report.task_id, len(report.records), report.generated_at))
        cls = inst.task.deadline_class
        if not report.batch:
            delay = sim.clock - report.generated_at
            sim.metrics.observe(f"collect.{cls.value}.delay_ms", delay / MILLISECOND)
            if delay > cls.bound:
                inst.stats.deadline_misses += 1
                sim.metrics.count(f"collect.{inst.task.task_id}.deadline_misses")
        sim.metrics.count(f"collect.{report.task_id}.delivered", len(report.records))

    def close_periods(self) -> None:
        """Flush the open budget period of each task into :attr:`audit`."""
        for inst in self.tasks.values():
            self.audit.append((inst.task.task_id, inst.period_start, inst.period_bits))
            inst.period_bits = 0.0

    def stats(self, task_id: str) -> TaskStats:
        return self.tasks[task_id].stats
