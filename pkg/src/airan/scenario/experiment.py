"""End-to-end experiment: every module wired onto one simulator run."""
from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..assurance import (DEFAULT_ACTION, Action, AnalyticPredictor, AppCatalog, AssuranceController, Degradation,
                         UserContext, UtilityKind, UtilityPolicy, perceive_traffic)
from ..collabai import (ComputeCapability, ComputeRegistry, ComputeTask, FederatedCoordinator, FlConfig, TaskKind,
                        schedule_pool, select_participants)
from ..datacollect import (DEFAULT_SCHEMA, AiBearer, BearerLink, CollectionService, CollectionTask, DataRecord,
                           DeadlineClass)
from ..energy import (COMPONENTS, EnergyProfile, EsKind, EsPolicy, StationConfig, apply_policy, diurnal_load,
                      energy_breakdown, qos_violations, total_energy)
from ..modelmgmt import (Command, ContextManager, DegradationRule, MetricBound, ModelDescriptor,
                         ModelMonitor, ModelRepository, MonitorAction, MonitoringReport, RetrainMode, RetrainPolicy,
                         UseCase, validate)
from ..rca import (FEATURE_NAMES, ROOT_CAUSES, GeneratorConfig, RcaConfig, TreeConfig, aggregate_grid,
                   diagnose_many, planted_dataset, precision_recall, rule_baseline, train_classifier)
from ..simcore import (AI_NODE, SECOND, Handover, MetricsDigest, NodeId, Simulator, Timer, Topology, TrafficArrival,
                       gnb, node_rng)
from .config import Scenario, dump_scenario
from .traffic import (STREAM_ENERGY, STREAM_PERCEPTION, STREAM_RCA, generate_handovers,
                      generate_traffic, gnb_base_load, load_at, ue_profiles)

FIVE_QI = {"video_call": 2, "cloud_gaming": 3, "live_stream": 7, "short_video": 8}
QOS_MODEL = "qos"
MOBILITY_MODEL = "mobility"
FL_MODEL = "fl-latency"


@dataclass(frozen=True)
class ApplyAction:
    ue: NodeId
    action: Action


@dataclass
class ArrivalRow:
    time: int
    ue: NodeId
    gnb: NodeId
    app: str
    vip: bool
    rsrp: float
    prb_util: float
    action: Action
    latency: float


@dataclass
class ExperimentResult:
    digest: MetricsDigest
    arrivals: list = field(default_factory=list)
    energy: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)


def _radio(rsrp: float, load: float) -> tuple[float, float]:
    """SINR (dB) and packet loss implied by coverage and cell load."""
    sinr = 0.5 * (rsrp + 100.0) + 10.0 * (1.0 - load)
    loss = min(1.0, 0.001 + 0.02 * max(0.0, -100.0 - rsrp) / 15.0 + 0.01 * load)
    return sinr, loss


class Experiment:
    def __init__(self, scenario: Scenario, seed: int | None = None):
        sc = self.sc = scenario
        self.seed = sc.seed if seed is None else seed
        t = sc.topology
        self.topology = Topology(gnb_count=t.gnb_count, ues_per_gnb=t.ues_per_gnb)
        self.sim = Simulator(self.topology, self.seed, run_id=f"{sc.name}-seed{self.seed}")
        self.gnbs = [gnb(i) for i in range(t.gnb_count)]
        self.profiles = ue_profiles(sc, self.seed, self.topology)
        self.base_load = {g: gnb_base_load(sc, self.seed, g) for g in self.gnbs}
        self.catalog = AppCatalog(sc.base_latency())
        self.predictor = AnalyticPredictor(self.catalog)
        self.repo = ModelRepository(clock=lambda: self.sim.clock)
        self.schema = DEFAULT_SCHEMA.extended(sc.schema)
        self.collect = CollectionService(self.sim, self.schema)
        self.arrivals: list[ArrivalRow] = []
        self.applied: dict[NodeId, Action] = {}
        self.awaiting: set[NodeId] = set()
        self.failures: dict[NodeId, int] = {}
        self.fl_data: dict[NodeId, list] = {g: [] for g in self.gnbs}
        self.window_lat: list[tuple[float, bool]] = []
        self._traffic_hash = hashlib.sha256()
        self._perception: dict[NodeId, np.random.Generator] = {}
        self.policy_actions = 0
        self.tables: dict[str, list[dict]] = {}
        self.energy: dict[str, Any] = {}

        for task in sc.collection:
            self.collect.install_task(CollectionTask(
                task.task_id, frozenset(task.attributes), DeadlineClass[task.deadline_class],
                NodeId.parse(task.destination), float(task.budget_bits), task.filter))
        self._setup_models()
        self._setup_compute()
        self._setup_fl()
        sim = self.sim
        sim.on(TrafficArrival, self._on_arrival)
        sim.on(Degradation, self._on_degradation)
        sim.on(ApplyAction, self._on_apply)
        sim.on(Handover, self._on_handover_signal)
        sim.on(Timer, self._on_timer)

    # -- setup -------------------------------------------------------------
    def _setup_models(self) -> None:
        sc, repo = self.sc, self.repo
        a = sc.policy.assurance
        self.controller: AssuranceController | None = None
        if a.enabled:
            policy = UtilityPolicy(UtilityKind[a.utility], target_ms=a.target_ms)
            self.controller = AssuranceController(policy, self.predictor, a.perception_accuracy, self.catalog,
                                                  expectation=a.expectation)
            repo.register_dataset("qos-calibration")
            h = repo.register_model(ModelDescriptor(QOS_MODEL, 1, UseCase.QOS, ("qos-calibration",)), self.predictor)
            for cmd in (Command.TRAIN_DONE, Command.VALIDATE_PASS, Command.DEPLOY, Command.ACTIVATE):
                repo.transition(h, cmd)
            self.qos_handle = h
            r = sc.policy.retrain
            if r.mode == "PERIODIC":
                self.retrain = RetrainPolicy(RetrainMode.PERIODIC, period=int(r.period_s * SECOND))
            else:
                self.retrain = RetrainPolicy(RetrainMode.PERFORMANCE_TRIGGERED,
                                             DegradationRule(r.metric, r.bound, r.higher_is_better), k=r.k)
            self.monitor = ModelMonitor(repo)
            self.sim.at(int(r.window_s * SECOND), Timer("monitor"))
        # gNBs run a mobility model version per UE context; half the cells still default to v1
        repo.register_dataset("mobility-traces")
        handles = []
        for v in (1, 2):
            h = repo.register_model(ModelDescriptor(MOBILITY_MODEL, v, UseCase.MOBILITY, ("mobility-traces",)))
            for cmd in (Command.TRAIN_DONE, Command.VALIDATE_PASS, Command.DEPLOY, Command.ACTIVATE):
                repo.transition(h, cmd)
            handles.append(h)
        defaults = {g: handles[1] if g.index % 2 == 0 else handles[0] for g in self.gnbs}
        self.context = ContextManager(defaults, sync=sc.topology.context_sync)
        for p in self.profiles:
            self.context.attach(p.ue, self.topology.serving_gnb(p.ue))

    def _setup_compute(self) -> None:
        self.compute = ComputeRegistry()
        self.compute.register(ComputeCapability(AI_NODE, 1e4, tags=frozenset({"train", "infer"})))
        for g in self.gnbs:
            self.compute.register(ComputeCapability(g, 1e3, tags=frozenset({"infer", "fl"})))

    def _setup_fl(self) -> None:
        fl = self.sc.policy.fl
        self.bearers = {}
        for g in self.gnbs:
            base = self.base_load[g]
            self.bearers[g] = BearerLink(self.sim, AiBearer(g, self.topology.capacity(g)),
                                         lambda t, base=base: load_at(base, self.sc, t))
        self.coordinator = FederatedCoordinator(
            self.sim, {}, FlConfig(local_steps=fl.local_steps, lr=fl.lr), self.bearers,
            eval_set=(np.zeros((0, 3)), np.zeros(0)))
        self.fl_weights = np.zeros(3)

    # -- event handlers ----------------------------------------------------
    def _serving_action(self, ue: NodeId) -> Action:
        return self.repo.infer(QOS_MODEL, lambda _model: self.applied.get(ue, DEFAULT_ACTION),
                               lambda: DEFAULT_ACTION)

    def _on_arrival(self, sim: Simulator, event) -> None:
        a: TrafficArrival = event.payload
        self._traffic_hash.update(f"{sim.clock}|{a.ue}|{a.app}|{a.bits!r}|{a.noise!r}\n".encode())
        prof = self.profiles[a.ue.index]
        g = self.topology.serving_gnb(a.ue)
        load = load_at(self.base_load[g], self.sc, sim.clock)
        ctx = UserContext(a.ue, a.app, prof.rsrp, load, vip=prof.vip)
        action = self._serving_action(a.ue)
        q = self.predictor(ctx, action)
        latency = q.latency * a.noise
        self.context.infer(a.ue, g)
        self.arrivals.append(ArrivalRow(sim.clock, a.ue, g, a.app, prof.vip, prof.rsrp, load, action, latency))
        self.window_lat.append((latency, prof.vip))
        sim.metrics.observe(f"latency.{a.app}", latency)
        sim.metrics.observe("latency.vip" if prof.vip else "latency.nonvip", latency)

        sinr, loss = _radio(prof.rsrp, load)
        attrs = {
            "velocity": prof.speed, "rsrp": prof.rsrp, "sinr": sinr, "prb_util": load, "throughput": q.throughput,
            "latency": latency, "tcp_rtt": 2.0 * latency + 10.0, "packet_loss": loss,
            "handover_failures": self.failures.pop(a.ue, 0), "position_x": prof.x, "position_y": prof.y,
            "five_qi": FIVE_QI.get(a.app, 9), "app_type": a.app, "device_class": prof.device_class,
            "battery_low": prof.battery_low, "vip": prof.vip,
        }
        self.collect.on_sample(DataRecord(g, sim.clock, attrs, ue=a.ue))
        self.fl_data[g].append((load, (-85.0 - prof.rsrp) / 20.0, math.log(latency)))

        if (self.controller is not None and prof.vip and latency > self.controller.policy.target_ms
                and a.ue not in self.awaiting and self.repo.active(QOS_MODEL) is not None):
            rng = self._perception.get(a.ue)
            if rng is None:
                rng = self._perception[a.ue] = sim.rng(a.ue, STREAM_PERCEPTION)
            observed = perceive_traffic(a.app, self.controller.accuracy, rng, self.catalog)
            self.awaiting.add(a.ue)
            sim.metrics.count("assurance.triggers")
            sim.send(g, AI_NODE, Degradation(sim.clock, ctx.with_app(observed)), 512)

    def _on_degradation(self, sim: Simulator, event) -> None:
        trig: Degradation = event.payload
        decided = self.repo.infer(QOS_MODEL, lambda _model: self.controller.decide(trig.ctx), lambda: None)
        if decided is None:
            self.awaiting.discard(trig.ctx.ue)
            return
        action = self.controller.assure(trig, decided)
        sim.send(AI_NODE, event.src, ApplyAction(trig.ctx.ue, action), 256)

    def _on_apply(self, sim: Simulator, event) -> None:
        msg: ApplyAction = event.payload
        self.awaiting.discard(msg.ue)
        if self.repo.active(QOS_MODEL) is None:
            return
        if self.applied.get(msg.ue, DEFAULT_ACTION) != msg.action:
            self.policy_actions += 1
            sim.metrics.count("assurance.actions")
        self.applied[msg.ue] = msg.action

    def _on_handover_signal(self, sim: Simulator, event) -> None:
        sim.metrics.count("handover.signalled")

    def _on_timer(self, sim: Simulator, event) -> None:
        timer: Timer = event.payload
        if timer.name == "handover":
            self._handover(timer.data)
        elif timer.name == "monitor":
            self._monitor_tick()

    def _handover(self, ho) -> None:
        sim = self.sim
        src = self.topology.serving_gnb(ho.ue)
        if ho.fails:
            self.failures[ho.ue] = self.failures.get(ho.ue, 0) + 1
            sim.metrics.count("handover.failures")
            return
        dst = self.gnbs[(src.index + 1) % len(self.gnbs)]
        self.context.handover(ho.ue, src, dst)
        self.topology.attach(ho.ue, dst)
        sim.metrics.count("handover.completed")
        sim.send(src, dst, Handover(ho.ue, src, dst), 1024)

    def _monitor_tick(self) -> None:
        sim, r = self.sim, self.sc.policy.retrain
        window = int(r.window_s * SECOND)
        start = sim.clock - window
        lats = [v for v, _ in self.window_lat]
        vip = [v for v, is_vip in self.window_lat if is_vip]
        self.window_lat = []
        mean_lat = float(np.mean(lats)) if lats else 0.0
        vip_lat = float(np.mean(vip)) if vip else 0.0
        sim.metrics.series(sim.clock, "window.mean_latency_ms", mean_lat)
        sim.metrics.series(sim.clock, "window.vip_latency_ms", vip_lat)
        h = self.repo.active(QOS_MODEL)
        if h is not None:
            report = MonitoringReport(h, (max(0, start), sim.clock),
                                      model_metrics={"accuracy": self.controller.accuracy},
                                      network_metrics={"vip_latency_ms": vip_lat, "mean_latency_ms": mean_lat})
            act = self.monitor.monitor(report, self.retrain)
            if act is MonitorAction.FALLBACK:
                self.policy_actions += 1
                sim.metrics.count("lcm.fallbacks")
                self.applied.clear()
            elif act is MonitorAction.RETRAIN_REQUESTED:
                sim.metrics.count("lcm.retrain_requests")
        nxt = sim.clock + window
        if nxt <= int(self.sc.horizon_s * SECOND):
            sim.at(nxt, Timer("monitor"))

    # -- federated rounds --------------------------------------------------
    def _fl_round(self) -> None:
        sim, fl = self.sim, self.sc.policy.fl
        horizon = int(self.sc.horizon_s * SECOND)
        remaining = horizon - sim.clock
        if remaining <= 0:
            return
        data = {}
        for g in self.gnbs:
            rows = self.fl_data[g]
            if len(rows) >= 5:
                arr = np.array(rows)
                data[g] = (np.column_stack([arr[:, 0], arr[:, 1], np.ones(len(arr))]), arr[:, 2])
        if not data:
            return
        caps = [c for c in self.compute.pool("fl") if c.node in data]
        parts = select_participants(caps, fl.round_size, {g: float(len(d[1])) for g, d in data.items()})
        self.coordinator.datasets = data
        self.coordinator.eval_set = (np.vstack([d[0] for _, d in sorted(data.items())]),
                                     np.concatenate([d[1] for _, d in sorted(data.items())]))
        self.coordinator.config.round_timeout = remaining
        self.fl_weights = self.coordinator.run_fl_round(parts, self.fl_weights)

    # -- run -----------------------------------------------------------------
    def run(self) -> ExperimentResult:
        sc, sim = self.sc, self.sim
        horizon = int(sc.horizon_s * SECOND)
        arrivals = generate_traffic(sc, self.seed)
        for a in arrivals:
            sim.at(a.time, TrafficArrival(a.ue, a.app, a.bits, a.noise), dst=None)
        for ho in generate_handovers(sc, self.seed):
            sim.at(ho.time, Timer("handover", ho))
        fl = sc.policy.fl
        if fl.enabled:
            for r in range(fl.rounds):
                t = int((r + 1) * fl.interval_s * SECOND)
                if t >= horizon:
                    break
                sim.run(t)
                self._fl_round()
        sim.run(horizon)
        self.collect.close_periods()
        sim.close()
        self._finish_fl()
        self._evaluate_energy()
        self._evaluate_rca()
        self._summarise()
        return ExperimentResult(sim.digest(), self.arrivals, self.energy, self.tables)

    # -- post-run evaluation -------------------------------------------------
    def _finish_fl(self) -> None:
        log = self.coordinator.log
        self.tables["fl_log"] = [
            {"round": r.round, "participants": ";".join(r.participants), "global_loss": r.global_loss,
             "mean_local_loss": float(np.mean(r.local_losses)), "started": r.started, "finished": r.finished}
            for r in log]
        self.sim.metrics.gauge("fl.rounds", len(log))
        if log:
            self.sim.metrics.gauge("fl.final_loss", log[-1].global_loss)
            ids = [f"fl-{p}" for p in sorted({p for r in log for p in r.participants})]
            for d in ids:
                self.repo.register_dataset(d)
            h = self.repo.register_model(ModelDescriptor(FL_MODEL, 1, UseCase.QOS), self.fl_weights.copy())
            self.repo.transition(h, Command.TRAIN_DONE, ids)

    def _evaluate_energy(self) -> None:
        e, tr = self.sc.policy.energy, self.sc.traffic
        if not e.policies:
            return
        station = StationConfig()
        spd = station.slots_per_day
        n_hist, n_eval = e.history_days * spd, e.days * spd
        series = []
        for g in self.gnbs:
            rng = node_rng(self.seed, g, STREAM_ENERGY)
            series.append(diurnal_load(e.history_days + e.days, rng, spd, trough=0.05,
                                       peak=min(1.0, self.base_load[g] + 0.2), peak_hour=tr.peak_hour))
        full = np.array(series)
        hist, load = full[:, :n_hist], full[:, n_hist:]
        total_rate = sum(tr.apps.values())
        tolerant = sum(tr.apps[a] for a in tr.delay_tolerant) / total_rate if total_rate > 0 else 0.0
        hours = ((n_hist + np.arange(n_eval)) % spd) * 24.0 / spd
        mix = np.full(n_eval, tolerant)
        if tr.night_delay_tolerant:
            mix[(hours >= 1.0) & (hours < 5.0)] = 1.0
        profile = EnergyProfile()
        rows, summary = [], []
        base_e = None
        for name in e.policies:
            pol = EsPolicy(EsKind[name], threshold=e.threshold, window=tuple(e.window), margin=e.margin,
                           aggregation_window=e.aggregation_window, tolerance_seconds=e.tolerance_s)
            trace = apply_policy(pol, load, mix, station, history=hist if n_hist else None)
            joules = total_energy(trace, profile)
            viol = qos_violations(trace, mix, pol, station)
            scaled = int(np.sum(trace.channels < station.max_channels))
            if pol.kind is not EsKind.BASELINE:
                self.policy_actions += scaled
            if pol.kind is EsKind.BASELINE:
                base_e = joules
            parts = energy_breakdown(trace, profile)
            comp = {c: float(parts[i].sum()) * trace.slot_seconds for i, c in enumerate(COMPONENTS)}
            self.energy[name] = {"joules": joules, "violations": viol, "scaled_slots": scaled,
                                 "deferrals": len(trace.deferrals), "components": comp, "trace": trace,
                                 "load": load, "app_mix": mix}
            self.sim.metrics.gauge(f"energy.{name}.joules", joules)
            self.sim.metrics.gauge(f"energy.{name}.qos_violations", len(viol))
            self.sim.metrics.gauge(f"energy.{name}.scaled_slots", scaled)
            for n in range(trace.shape[0]):
                for t in range(trace.shape[1]):
                    rows.append({"policy": name, "station": str(self.gnbs[n]), "slot": t,
                                 "channels": int(trace.channels[n, t]), "carriers": int(trace.carriers[n, t]),
                                 "tx_power_w": float(trace.tx_power[n, t]),
                                 **{f"{c}_w": float(parts[i, n, t]) for i, c in enumerate(COMPONENTS)}})
            summary.append({"policy": name, "energy_j": joules, **{f"{c}_j": v for c, v in comp.items()},
                            "scaled_slots": scaled, "deferrals": len(trace.deferrals),
                            "qos_violations": len(viol)})
        if base_e:
            for s in summary:
                s["saving_vs_baseline"] = 1.0 - s["energy_j"] / base_e
                self.sim.metrics.gauge(f"energy.{s['policy']}.saving", s["saving_vs_baseline"])
        self.tables["energy_report"] = rows
        self.tables["energy_summary"] = summary

    def _evaluate_rca(self) -> None:
        r = self.sc.policy.rca
        grid = aggregate_grid(self.collect.delivered.get("grid_rca", []))
        self.tables["grid_summary"] = [{"ix": g.ix, "iy": g.iy, "mean_rtt": s.mean_rtt, "mean_rsrp": s.mean_rsrp,
                                        "mean_sinr": s.mean_sinr, "n": s.n} for g, s in grid.items()]
        self.sim.metrics.gauge("grid.cells", len(grid))
        if not r.enabled:
            return
        now = self.sim.clock
        task = ComputeTask("rca-train", TaskKind.TRAINING, demand=float(r.train * r.n_trees) / 100.0,
                           deadline=now + 60 * SECOND, priority=1, origin=AI_NODE,
                           required_tags=frozenset({"train"}), submitted=now)
        plan = schedule_pool([task], self.compute.pool(), now)
        if task.task_id not in plan.assignments:
            self.sim.metrics.gauge("rca.rejected", plan.rejections[task.task_id].value)
            return
        rng = node_rng(self.seed, AI_NODE, STREAM_RCA)
        gen = GeneratorConfig(overlap=r.overlap)
        train = planted_dataset(r.train, rng, gen)
        test = planted_dataset(r.test, rng, gen)
        clf = train_classifier(train, RcaConfig(TreeConfig(n_trees=r.n_trees, seed=self.seed)), self.repo)
        preds = diagnose_many(clf, [f for f, _ in test])
        truth = [lab.root_cause for _, lab in test]
        learned = precision_recall(truth, [p.root_cause for p in preds], list(ROOT_CAUSES))
        rules = precision_recall(truth, [rule_baseline(f) for f, _ in test], list(ROOT_CAUSES))
        records = [DataRecord(None, now, {"row": i, "label": lab.root_cause.value}) for i, (_, lab) in enumerate(test)]
        validate(self.repo, clf.handle, records, MetricBound("precision", 0.9),
                 predictor=lambda rec: preds[rec.attrs["row"]].root_cause.value)
        rows = []
        for c in ROOT_CAUSES:
            rows.append({"root_cause": c.value, "precision": learned[c][0], "recall": learned[c][1],
                         "rule_precision": rules[c][0], "rule_recall": rules[c][1]})
            self.sim.metrics.gauge(f"rca.{c.value}.precision", learned[c][0])
            self.sim.metrics.gauge(f"rca.{c.value}.recall", learned[c][1])
        self.sim.metrics.gauge("rca.macro_precision", float(np.mean([v[0] for v in learned.values()])))
        self.sim.metrics.gauge("rca.macro_recall", float(np.mean([v[1] for v in learned.values()])))
        self.sim.metrics.gauge("rca.rule_macro_precision", float(np.mean([v[0] for v in rules.values()])))
        self.sim.metrics.gauge("rca.rule_macro_recall", float(np.mean([v[1] for v in rules.values()])))
        self.sim.metrics.gauge("rca.features", len(FEATURE_NAMES))
        self.tables["rca_report"] = rows

    def _summarise(self) -> None:
        sim = self.sim
        sim.metrics.gauge("policy.actions", self.policy_actions)
        sim.metrics.gauge("traffic.arrivals", len(self.arrivals))
        sim.metrics.gauge("traffic.hash", self._traffic_hash.hexdigest())
        sim.metrics.gauge("context.inferences", self.context.inferences)
        sim.metrics.gauge("context.mismatches", len(self.context.mismatches))
        viol = 0
        for task_id, _, bits in self.collect.audit:
            if bits > self.collect.tasks[task_id].task.volume_budget:
                viol += 1
        for link in self.bearers.values():
            viol += sum(1 for _, share, load in link.audit
                        if share > link.bearer.cap_fraction + 1e-12 or share + load > 1.0 + 1e-12)
        sim.metrics.gauge("collect.audit_violations", viol)
        self.tables["kpi_timeseries"] = [{"time_us": t, "metric": n, "value": v} for t, n, v in sim.metrics.rows]
        self.tables["assurance_log"] = [
            {"time_us": row.time, "ue": str(row.ue), "observed_app": row.observed_app,
             "weight": row.action.scheduling_weight, "grant": row.action.resource_grant,
             "predicted_latency_ms": row.predicted_latency, "rsrp": row.ctx.rsrp, "prb_util": row.ctx.prb_util}
            for row in (self.controller.log if self.controller is not None else [])]
        self.tables["repository"] = self.repo.export_rows()
        self.tables["collection"] = [
            {"task_id": tid, "deadline_class": inst.task.deadline_class.value, "destination": str(inst.task.destination),
             "generated": inst.stats.generated, "matched": inst.stats.matched, "delivered": inst.stats.delivered,
             "dropped_budget": inst.stats.dropped_budget, "deadline_misses": inst.stats.deadline_misses,
             "batches": inst.stats.batches}
            for tid, inst in sorted(self.collect.tasks.items())]


def write_outputs(result: ExperimentResult, scenario: Scenario, seed: int, out_dir) -> None:
    """Summary JSON plus one CSV per module export."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = {"scenario": scenario.name, "seed": seed, **result.digest.to_dict()}
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True, default=str) + "\n")
    (out / "scenario.yaml").write_text(dump_scenario(scenario))
    for name, rows in sorted(result.tables.items()):
        with open(out / f"{name}.csv", "w", newline="", encoding="utf-8") as fh:
            if not rows:
                continue
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)


def run_experiment(scenario: Scenario, out_dir=None, seed: int | None = None) -> MetricsDigest:
    """Run ``scenario`` to its horizon and return the metrics digest (files go to ``out_dir``)."""
    seed = scenario.seed if seed is None else seed
    result = Experiment(scenario, seed).run()
    if out_dir is not None:
        write_outputs(result, scenario, seed, out_dir)
    return result.digest
