"""Scenario description, YAML loading with strict validation, and bundled presets."""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from typing import Any

import yaml

from ..assurance import DEFAULT_BASE_LATENCY, UtilityKind
from ..datacollect import DEFAULT_SCHEMA, AttrType, DeadlineClass, FilterSyntaxError, FilterTypeError, parse_filter
from ..datacollect.schema import UnknownField
from ..energy import EsKind
from ..modelmgmt import RetrainMode
from ..simcore import NodeId


class ParseError(ValueError):
    def __init__(self, path: str, line: int | None, message: str):
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


class ValidationError(ValueError):
    """Raised with the dotted path of the failing constraint."""


@dataclass
class TopologyConfig:
    gnb_count: int = 8
    ues_per_gnb: int = 25
    area_m: float = 1000.0
    handover_rate: float = 0.01             # per UE per second
    handover_failure_prob: float = 0.05
    context_sync: bool = True


@dataclass
class TrafficConfig:
    apps: dict = field(default_factory=lambda: {"short_video": 0.2, "web_browsing": 0.2, "video_call": 0.05,
                                                "software_update": 0.02})
    app_latency_ms: dict = field(default_factory=dict)     # base latency of apps not in the default catalog
    mean_bits: float = 2e5
    prb_range: tuple = (0.3, 0.5)
    rsrp_range: tuple = (-115.0, -85.0)
    speed_range: tuple = (0.0, 60.0)                       # km/h
    vip_fraction: float = 0.1
    diurnal: bool = False
    start_hour: float = 12.0
    peak_hour: float = 16.0
    trough: float = 0.2                                    # night rate relative to peak
    delay_tolerant: list = field(default_factory=lambda: ["software_update"])
    night_delay_tolerant: bool = True
    noise_sigma: float = 0.2


@dataclass
class AssuranceConfig:
    enabled: bool = True
    utility: str = "LATENCY_THRESHOLD"
    target_ms: float = 30.0
    perception_accuracy: float = 0.9
    expectation: str = "observed"


@dataclass
class RetrainConfig:
    mode: str = "PERFORMANCE_TRIGGERED"
    metric: str = "vip_latency_ms"
    bound: float = 500.0
    higher_is_better: bool = False
    k: int = 3
    period_s: float = 60.0
    window_s: float = 20.0


@dataclass
class EnergyConfig:
    policies: list = field(default_factory=lambda: [k.value for k in EsKind])
    days: int = 7
    history_days: int = 3
    threshold: float = 0.3
    window: tuple = (0, 28)
    margin: float = 0.05
    aggregation_window: int = 4
    tolerance_s: float = 3600.0


@dataclass
class FlBlock:
    enabled: bool = True
    rounds: int = 5
    interval_s: float = 10.0
    round_size: int = 4
    local_steps: int = 5
    lr: float = 0.05


@dataclass
class RcaBlock:
    enabled: bool = True
    train: int = 2000
    test: int = 1000
    overlap: float = 0.1
    n_trees: int = 10


@dataclass
class PolicyConfig:
    assurance: AssuranceConfig = field(default_factory=AssuranceConfig)
    retrain: RetrainConfig = field(default_factory=RetrainConfig)
    energy: EnergyConfig = field(default_factory=EnergyConfig)
    fl: FlBlock = field(default_factory=FlBlock)
    rca: RcaBlock = field(default_factory=RcaBlock)


@dataclass
class CollectionTaskConfig:
    task_id: str
    attributes: list
    deadline_class: str = "NEAR_RT"
    destination: str = "AI_NODE0"
    budget_bits: float = 1e6
    filter: str | None = None


def _default_tasks() -> list:
    return [
        CollectionTaskConfig("vip_degradation", ["latency", "rsrp", "prb_util", "app_type"], "REAL_TIME",
                             "AI_NODE0", 2e5, "vip == true AND latency > 30"),
        CollectionTaskConfig("grid_rca", ["position_x", "position_y", "tcp_rtt", "rsrp", "sinr"], "NEAR_RT",
                             "AI_NODE0", 2e5, None),
        CollectionTaskConfig("cell_kpi", ["latency", "throughput", "prb_util", "sinr"], "OAM",
                             "OAM0", 5e8, None),
    ]


@dataclass
class Scenario:
    name: str = "custom"
    description: str = ""
    environment: str = "cbd"
    load_band: str = "medium"
    seed: int = 0
    horizon_s: float = 60.0
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    schema: dict = field(default_factory=dict)          # extra collectable attributes: name -> type
    collection: list = field(default_factory=_default_tasks)

    def base_latency(self) -> dict:
        out = dict(DEFAULT_BASE_LATENCY)
        out.update(self.traffic.app_latency_ms)
        return out

    def to_dict(self) -> dict:
        return _plain(dataclasses.asdict(self))


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


_NESTED = {
    (Scenario, "topology"): TopologyConfig, (Scenario, "traffic"): TrafficConfig,
    (Scenario, "policy"): PolicyConfig, (PolicyConfig, "assurance"): AssuranceConfig,
    (PolicyConfig, "retrain"): RetrainConfig, (PolicyConfig, "energy"): EnergyConfig,
    (PolicyConfig, "fl"): FlBlock, (PolicyConfig, "rca"): RcaBlock,
}


def _build(cls, data: Any, path: str):
    if not isinstance(data, dict):
        raise ValidationError(f"{path or 'scenario'}: expected a mapping")
    names = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(names))
    if unknown:
        raise ValidationError(f"{path + '.' if path else ''}{unknown[0]}: unknown key")
    kwargs = {}
    for key, value in data.items():
        sub = f"{path}.{key}" if path else key
        nested = _NESTED.get((cls, key))
        if nested is not None:
            kwargs[key] = _build(nested, value, sub)
        elif cls is Scenario and key == "collection":
            if not isinstance(value, list):
                raise ValidationError("collection: expected a list of tasks")
            kwargs[key] = [_build(CollectionTaskConfig, t, f"collection[{i}]") for i, t in enumerate(value)]
        elif isinstance(names[key].default, tuple):
            if not isinstance(value, (list, tuple)):
                raise ValidationError(f"{sub}: expected a list")
            kwargs[key] = tuple(value)
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ValidationError(f"{path or 'scenario'}: {exc}") from None


def _require(cond: bool, where: str, what: str) -> None:
    if not cond:
        raise ValidationError(f"{where}: {what}")


def validate(sc: Scenario) -> Scenario:
    """Check every cross-reference and range; raise ValidationError naming the first failure."""
    _require(sc.horizon_s > 0, "horizon_s", "must be positive")
    _require(isinstance(sc.seed, int) and sc.seed >= 0, "seed", "must be a non-negative integer")
    t = sc.topology
    _require(t.gnb_count >= 1, "topology.gnb_count", "must be at least 1")
    _require(t.ues_per_gnb >= 1, "topology.ues_per_gnb", "must be at least 1")
    _require(t.area_m > 0, "topology.area_m", "must be positive")
    _require(t.handover_rate >= 0, "topology.handover_rate", "must be non-negative")
    _require(0 <= t.handover_failure_prob <= 1, "topology.handover_failure_prob", "must lie in [0, 1]")

    tr = sc.traffic
    known = sc.base_latency()
    for app, rate in tr.apps.items():
        _require(app in known, "traffic.apps", f"undeclared app {app!r} (add it to traffic.app_latency_ms)")
        _require(isinstance(rate, (int, float)) and rate >= 0, f"traffic.apps.{app}", "rate must be non-negative")
    for app, lat in tr.app_latency_ms.items():
        _require(isinstance(lat, (int, float)) and lat > 0, f"traffic.app_latency_ms.{app}", "must be positive")
    for app in tr.delay_tolerant:
        _require(app in tr.apps, "traffic.delay_tolerant", f"undeclared app {app!r}")
    lo, hi = tr.prb_range
    _require(0 <= lo <= hi <= 1, "traffic.prb_range", "must satisfy 0 <= lo <= hi <= 1")
    lo, hi = tr.rsrp_range
    _require(-140 <= lo <= hi <= -40, "traffic.rsrp_range", "must satisfy -140 <= lo <= hi <= -40")
    lo, hi = tr.speed_range
    _require(0 <= lo <= hi, "traffic.speed_range", "must satisfy 0 <= lo <= hi")
    _require(0 <= tr.vip_fraction <= 1, "traffic.vip_fraction", "must lie in [0, 1]")
    _require(tr.mean_bits > 0, "traffic.mean_bits", "must be positive")
    _require(0 <= tr.trough <= 1, "traffic.trough", "must lie in [0, 1]")
    _require(tr.noise_sigma >= 0, "traffic.noise_sigma", "must be non-negative")

    p = sc.policy
    _require(p.assurance.utility in UtilityKind.__members__, "policy.assurance.utility",
             f"unknown utility {p.assurance.utility!r}")
    _require(p.assurance.target_ms > 0, "policy.assurance.target_ms", "must be positive")
    _require(p.assurance.expectation in ("posterior", "observed"), "policy.assurance.expectation",
             "must be 'posterior' or 'observed'")
    _require(0 <= p.assurance.perception_accuracy <= 1, "policy.assurance.perception_accuracy", "must lie in [0, 1]")
    r = p.retrain
    _require(r.mode in RetrainMode.__members__, "policy.retrain.mode", f"unknown mode {r.mode!r}")
    _require(r.k >= 1, "policy.retrain.k", "must be at least 1")
    _require(r.period_s > 0 and r.window_s > 0, "policy.retrain", "period_s and window_s must be positive")
    _require(r.metric in ("vip_latency_ms", "mean_latency_ms", "accuracy"), "policy.retrain.metric",
             f"unknown metric {r.metric!r}")
    e = p.energy
    for kind in e.policies:
        _require(kind in EsKind.__members__, "policy.energy.policies", f"unknown policy {kind!r}")
    _require(e.days >= 1 and e.history_days >= 0, "policy.energy.days", "days >= 1 and history_days >= 0")
    _require(0 < e.threshold < 1, "policy.energy.threshold", "must lie in (0, 1)")
    _require(len(e.window) == 2 and e.window[0] != e.window[1], "policy.energy.window", "must be a non-empty slot range")
    _require(e.aggregation_window >= 1, "policy.energy.aggregation_window", "must be positive")
    _require(e.tolerance_s > 0 and e.margin >= 0, "policy.energy", "tolerance_s > 0 and margin >= 0")
    _require(p.fl.rounds >= 0 and p.fl.interval_s > 0 and p.fl.round_size >= 1, "policy.fl",
             "rounds >= 0, interval_s > 0, round_size >= 1")
    _require(p.fl.local_steps >= 1 and p.fl.lr > 0, "policy.fl", "local_steps >= 1 and lr > 0")
    _require(p.rca.train >= 10 and p.rca.test >= 1, "policy.rca", "train >= 10 and test >= 1")
    _require(0 <= p.rca.overlap <= 1, "policy.rca.overlap", "must lie in [0, 1]")
    _require(p.rca.n_trees >= 1, "policy.rca.n_trees", "must be positive")

    for name, kind in sc.schema.items():
        _require(kind in {a.value for a in AttrType}, f"schema.{name}", f"unknown type {kind!r}")
    schema = DEFAULT_SCHEMA.extended(sc.schema)
    seen = set()
    for i, task in enumerate(sc.collection):
        where = f"collection[{i}]"
        _require(task.task_id not in seen, where, f"duplicate task id {task.task_id!r}")
        seen.add(task.task_id)
        _require(task.deadline_class in DeadlineClass.__members__, f"{where}.deadline_class",
                 f"unknown class {task.deadline_class!r}")
        _require(task.budget_bits > 0, f"{where}.budget_bits", "must be positive")
        try:
            NodeId.parse(task.destination)
        except ValueError:
            raise ValidationError(f"{where}.destination: cannot parse {task.destination!r}") from None
        for a in task.attributes:
            _require(a in schema, f"{where}.attributes", f"undeclared attribute {a!r}")
        if task.filter is not None:
            try:
                parse_filter(task.filter, schema)
            except (FilterSyntaxError, FilterTypeError, UnknownField) as exc:
                raise ValidationError(f"{where}.filter: {exc}") from None
    return sc


def scenario_from_dict(data: Any) -> Scenario:
    return validate(_build(Scenario, data, ""))


def dump_scenario(sc: Scenario) -> str:
    return yaml.safe_dump(sc.to_dict(), sort_keys=False)


def parse_scenario_text(text: str, path: str = "<string>") -> Scenario:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ParseError(path, line, str(getattr(exc, "problem", None) or exc)) from None
    if data is None:
        raise ParseError(path, 1, "empty scenario file")
    return scenario_from_dict(data)


def load_scenario(path_or_preset: str | os.PathLike) -> Scenario:
    """Load a YAML scenario file, or a bundled preset when given a preset name."""
    path = os.fspath(path_or_preset)
    if not os.path.exists(path):
        if path in PRESETS:
            return preset(path)
        raise FileNotFoundError(f"no scenario file or preset named {path!r}")
    with open(path, encoding="utf-8") as fh:
        return parse_scenario_text(fh.read(), path)


def with_param(sc: Scenario, dotted: str, value: Any) -> Scenario:
    """Copy of ``sc`` with one dotted-path field replaced, re-validated."""
    data = sc.to_dict()
    node = data
    keys = dotted.split(".")
    for k in keys[:-1]:
        if not isinstance(node, dict) or k not in node:
            raise ValidationError(f"{dotted}: unknown key {k!r}")
        node = node[k]
    if not isinstance(node, dict) or keys[-1] not in node:
        raise ValidationError(f"{dotted}: unknown key {keys[-1]!r}")
    if isinstance(node[keys[-1]], list) and not isinstance(value, list):
        value = [value]
    node[keys[-1]] = value
    return scenario_from_dict(data)


# -- presets --------------------------------------------------------------------

LOAD_BANDS = {"light": (0.1, 0.3), "medium": (0.3, 0.5), "heavy": (0.5, 0.7)}

ENVIRONMENTS = {
    "cbd": dict(rsrp_range=(-105.0, -85.0), vip_fraction=0.15, speed_range=(0.0, 40.0),
                apps={"short_video": 0.25, "web_browsing": 0.25, "video_call": 0.1, "software_update": 0.02}),
    "campus": dict(rsrp_range=(-110.0, -85.0), vip_fraction=0.1, speed_range=(0.0, 15.0),
                   apps={"short_video": 0.3, "cloud_gaming": 0.1, "web_browsing": 0.2, "file_download": 0.03}),
    "hospital": dict(rsrp_range=(-115.0, -90.0), vip_fraction=0.2, speed_range=(0.0, 5.0),
                     apps={"video_call": 0.15, "web_browsing": 0.15, "iot_telemetry": 0.1, "software_update": 0.02}),
    "residential": dict(rsrp_range=(-112.0, -88.0), vip_fraction=0.1, speed_range=(0.0, 30.0),
                        apps={"live_stream": 0.2, "short_video": 0.2, "file_download": 0.05,
                              "software_update": 0.03}),
}

_TOLERANT = {"software_update", "file_download", "iot_telemetry"}


def _env_preset(env: str, band: str) -> Scenario:
    e = ENVIRONMENTS[env]
    traffic = TrafficConfig(apps=dict(e["apps"]), prb_range=LOAD_BANDS[band], rsrp_range=e["rsrp_range"],
                            speed_range=e["speed_range"], vip_fraction=e["vip_fraction"],
                            delay_tolerant=sorted(a for a in e["apps"] if a in _TOLERANT))
    return Scenario(name=f"{env}_{band}", description=f"{env} environment under {band} load",
                    environment=env, load_band=band, traffic=traffic)


def _standard_diurnal() -> Scenario:
    sc = _env_preset("residential", "medium")
    sc.name = "standard_diurnal"
    sc.description = "residential cells with a daily load cycle, used for energy-policy comparison"
    sc.traffic.diurnal = True
    return sc


def _minimal() -> Scenario:
    sc = Scenario(name="minimal", description="one gNB, one UE, every policy off")
    sc.topology = TopologyConfig(gnb_count=1, ues_per_gnb=1, handover_rate=0.0)
    sc.traffic = TrafficConfig(apps={"web_browsing": 0.5}, delay_tolerant=[], vip_fraction=0.0)
    sc.policy = PolicyConfig(assurance=AssuranceConfig(enabled=False), energy=EnergyConfig(policies=[]),
                             fl=FlBlock(enabled=False), rca=RcaBlock(enabled=False))
    sc.collection = []
    return sc


PRESETS: dict[str, Any] = {f"{env}_{band}": (lambda env=env, band=band: _env_preset(env, band))
                           for env in ENVIRONMENTS for band in LOAD_BANDS}
PRESETS["standard_diurnal"] = _standard_diurnal
PRESETS["minimal"] = _minimal


def preset(name: str) -> Scenario:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return validate(factory())
