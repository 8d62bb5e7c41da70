"""Per-UE arrival and mobility processes drawn before any policy is wired."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ..simcore import NodeId, SECOND, SimTime, Topology, node_rng, ue
from .config import Scenario

# generator streams per UE; fixed numbers so adding a stream never shifts another
STREAM_PROFILE = 1
STREAM_ARRIVALS = 2
STREAM_MOBILITY = 3
STREAM_PERCEPTION = 4
STREAM_GNB = 5
STREAM_ENERGY = 6
STREAM_RCA = 7


@dataclass(frozen=True)
class Arrival:
    time: SimTime
    ue: NodeId
    app: str
    bits: float
    noise: float


@dataclass(frozen=True)
class HandoverEvent:
    time: SimTime
    ue: NodeId
    fails: bool


@dataclass(frozen=True)
class UeProfile:
    ue: NodeId
    rsrp: float
    vip: bool
    x: float
    y: float
    speed: float
    device_class: str
    battery_low: bool


DEVICE_MIX = ("phone", "phone", "phone", "tablet", "cpe", "iot")


def daily_shape(hour: np.ndarray | float, peak_hour: float, trough: float):
    """Relative arrival intensity over the day, 1 at ``peak_hour`` and ``trough`` at its low."""
    c = 0.5 * (1.0 + np.cos(2 * np.pi * (np.asarray(hour) - peak_hour) / 24.0))
    return trough + (1.0 - trough) * c ** 2


def ue_profiles(sc: Scenario, seed: int, topology: Topology) -> list[UeProfile]:
    tr = sc.traffic
    out = []
    for i in range(topology.ue_count):
        u = ue(i)
        rng = node_rng(seed, u, STREAM_PROFILE)
        out.append(UeProfile(
            ue=u,
            rsrp=float(rng.uniform(*tr.rsrp_range)),
            vip=bool(rng.random() < tr.vip_fraction),
            x=float(rng.uniform(0, sc.topology.area_m)),
            y=float(rng.uniform(0, sc.topology.area_m)),
            speed=float(rng.uniform(*tr.speed_range)),
            device_class=DEVICE_MIX[int(rng.integers(len(DEVICE_MIX)))],
            battery_low=bool(rng.random() < 0.1),
        ))
    return out


def generate_traffic(sc: Scenario, seed: int | None = None) -> list[Arrival]:
    """Arrivals of every UE over the horizon, ordered by (time, ue).

    Each UE draws from its own generator stream: a homogeneous Poisson
    process at the peak rate, thinned by the daily shape when ``diurnal`` is
    on. Bits and latency noise are drawn with the arrival, so nothing a
    policy does downstream can shift the stream.
    """
    seed = sc.seed if seed is None else seed
    tr = sc.traffic
    apps = sorted(tr.apps)
    rates = np.array([tr.apps[a] for a in apps], dtype=np.float64)
    total = float(rates.sum())
    horizon = sc.horizon_s
    n_ue = sc.topology.gnb_count * sc.topology.ues_per_gnb
    out: list[Arrival] = []
    if total <= 0:
        return out
    probs = rates / total
    for i in range(n_ue):
        u = ue(i)
        rng = node_rng(seed, u, STREAM_ARRIVALS)
        t = 0.0
        while True:
            t += float(rng.exponential(1.0 / total))
            if t >= horizon:
                break
            app = apps[int(rng.choice(len(apps), p=probs))]
            bits = float(rng.exponential(tr.mean_bits))
            noise = float(rng.lognormal(0.0, tr.noise_sigma)) if tr.noise_sigma > 0 else 1.0
            keep = float(rng.random())
            if tr.diurnal:
                hour = (tr.start_hour + t / 3600.0) % 24.0
                if keep >= float(daily_shape(hour, tr.peak_hour, tr.trough)):
                    continue
            out.append(Arrival(int(round(t * SECOND)), u, app, bits, noise))
    out.sort(key=lambda a: (a.time, a.ue))
    return out


def generate_handovers(sc: Scenario, seed: int | None = None) -> list[HandoverEvent]:
    seed = sc.seed if seed is None else seed
    rate = sc.topology.handover_rate
    out: list[HandoverEvent] = []
    if rate <= 0 or sc.topology.gnb_count < 2:
        return out
    n_ue = sc.topology.gnb_count * sc.topology.ues_per_gnb
    for i in range(n_ue):
        u = ue(i)
        rng = node_rng(seed, u, STREAM_MOBILITY)
        t = 0.0
        while True:
            t += float(rng.exponential(1.0 / rate))
            if t >= sc.horizon_s:
                break
            out.append(HandoverEvent(int(round(t * SECOND)), u,
                                     bool(rng.random() < sc.topology.handover_failure_prob)))
    out.sort(key=lambda h: (h.time, h.ue))
    return out


def traffic_fingerprint(arrivals: list[Arrival]) -> str:
    h = hashlib.sha256()
    for a in arrivals:
        h.update(f"{a.time}|{a.ue}|{a.app}|{a.bits!r}|{a.noise!r}\n".encode())
    return h.hexdigest()


def gnb_base_load(sc: Scenario, seed: int, g: NodeId) -> float:
    rng = node_rng(seed, g, STREAM_GNB)
    lo, hi = sc.traffic.prb_range
    return float(rng.uniform(lo, hi))


def load_at(base: float, sc: Scenario, t: SimTime) -> float:
    """PRB utilisation of a cell at sim time ``t``."""
    if not sc.traffic.diurnal:
        return base
    hour = (sc.traffic.start_hour + t / SECOND / 3600.0) % 24.0
    return float(min(1.0, base * daily_shape(hour, sc.traffic.peak_hour, sc.traffic.trough)))
