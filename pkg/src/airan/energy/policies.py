"""Energy-saving policies that turn a load series into an activity trace."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .forecast import rolling_forecast
from .model import ActivityTrace


class SeriesLengthMismatch(ValueError):
    pass


class EsKind(enum.Enum):
    BASELINE = "BASELINE"
    STATIC_THRESHOLD = "STATIC_THRESHOLD"
    PREDICTIVE = "PREDICTIVE"
    SERVICE_AWARE = "SERVICE_AWARE"


@dataclass(frozen=True)
class StationConfig:
    max_channels: int = 8
    max_carriers: int = 3
    reduced_channels: int = 4
    reduced_carriers: int = 1
    max_tx_power: float = 20.0          # W per active channel at full load
    slot_seconds: float = 900.0
    slots_per_day: int = 96

    def __post_init__(self):
        if not 0 < self.reduced_channels <= self.max_channels:
            raise ValueError("reduced_channels must be in (0, max_channels]")
        if not 0 < self.reduced_carriers <= self.max_carriers:
            raise ValueError("reduced_carriers must be in (0, max_carriers]")
        if self.max_tx_power < 0 or self.slot_seconds <= 0 or self.slots_per_day < 1:
            raise ValueError("invalid station config")

    @property
    def reduced_capacity(self) -> float:
        """Share of full-load traffic the scaled-down configuration can carry."""
        return self.reduced_channels / self.max_channels


@dataclass(frozen=True)
class EsPolicy:
    """One switchable energy-saving policy.

    ``window`` is the static policy's slot-of-day range ``[start, end)``
    (wrapping past midnight when ``start > end``). The predictive policy
    looks ``horizon_slots`` ahead with a seasonal-naive forecast over ``k``
    days; with ``adaptive`` set it raises its threshold to the reduced
    configuration's capacity minus ``margin``. The service-aware policy
    groups up to ``aggregation_window`` fully delay-tolerant slots whose
    deferral stays within ``tolerance_seconds``.
    """

    kind: EsKind = EsKind.BASELINE
    threshold: float = 0.3
    window: tuple[int, int] = (0, 28)
    horizon_slots: int = 1
    margin: float = 0.05
    k: int = 3
    adaptive: bool = True
    aggregation_window: int = 4
    tolerance_seconds: float = 3600.0

    def __post_init__(self):
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must be in (0, 1)")
        if self.window[0] == self.window[1]:
            raise ValueError("static window must be non-empty")
        if self.horizon_slots < 1 or self.k < 1 or self.aggregation_window < 1:
            raise ValueError("horizon, k and aggregation window must be positive")
        if self.margin < 0 or self.tolerance_seconds <= 0:
            raise ValueError("margin must be non-negative and tolerance positive")


@dataclass(frozen=True)
class Deferral:
    station: int
    from_slot: int
    to_slot: int
    load: float
    delay_seconds: float
    tolerant_share: float


def _in_window(slot_of_day: np.ndarray, window: tuple[int, int]) -> np.ndarray:
    a, b = window
    if a < b:
        return (slot_of_day >= a) & (slot_of_day < b)
    return (slot_of_day >= a) | (slot_of_day < b)


def _as_2d(x, name: str) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if arr.ndim != 2:
        raise ValueError(f"{name} must be one- or two-dimensional")
    return arr


def predictive_mask(load: np.ndarray, history: np.ndarray | None, policy: EsPolicy,
                    station: StationConfig) -> np.ndarray:
    """Slots where the predictive policy runs the reduced configuration."""
    if policy.horizon_slots > station.slots_per_day:
        raise ValueError("horizon longer than one seasonal period")
    thr = policy.threshold
    if policy.adaptive:
        thr = max(thr, station.reduced_capacity - policy.margin)
    period = station.slots_per_day
    out = np.zeros(load.shape, dtype=bool)
    for n in range(load.shape[0]):
        hist = np.empty(0) if history is None else history[n]
        # same-position values lie a full period back, so any horizon up to
        # one period sees exactly the one-slot-ahead forecast
        pred = rolling_forecast(hist, load[n], period=period, k=policy.k)
        ok = ~np.isnan(pred)
        low = np.zeros_like(ok)
        low[ok] = pred[ok] < thr
        within = np.zeros_like(ok)
        within[ok] = load[n][ok] <= pred[ok] + policy.margin
        out[n] = low & within
    return out


def _aggregate(load_row: np.ndarray, mix_row: np.ndarray, policy: EsPolicy, station: StationConfig,
               n: int) -> tuple[np.ndarray, np.ndarray, list[Deferral]]:
    """Fold runs of fully delay-tolerant slots into their last slot."""
    carried = load_row.copy()
    silent = np.zeros(len(load_row), dtype=bool)
    deferrals: list[Deferral] = []
    T = len(load_row)
    w = policy.aggregation_window
    max_lag = int(policy.tolerance_seconds // station.slot_seconds)
    # the slot that receives a block must still fit the scaled-down setup
    cap = station.reduced_capacity
    i = 0
    while i < T:
        if mix_row[i] < 1.0:
            i += 1
            continue
        total = load_row[i]
        j = i
        while (j + 1 < T and j + 1 - i < w and j + 1 - i <= max_lag and mix_row[j + 1] >= 1.0
               and total + load_row[j + 1] <= cap):
            j += 1
            total += load_row[j]
        if j > i:
            for s in range(i, j):
                deferrals.append(Deferral(n, s, j, float(load_row[s]),
                                          (j - s) * station.slot_seconds, float(mix_row[s])))
                carried[s] = 0.0
                silent[s] = True
            carried[j] = total
        i = j + 1
    return carried, silent, deferrals


def apply_policy(policy: EsPolicy, load_series, app_mix, station: StationConfig | None = None,
                 history=None) -> ActivityTrace:
    """Activity trace produced by ``policy`` for per-slot PRB load.

    ``load_series`` and ``app_mix`` (the delay-tolerant share of each slot's
    traffic) are ``(T,)`` or ``(N, T)``; ``app_mix`` may be ``(T,)`` for all
    stations. ``history`` holds earlier slots for the predictor.
    """
    station = station or StationConfig()
    load = _as_2d(load_series, "load_series")
    mix = _as_2d(app_mix, "app_mix")
    N, T = load.shape
    if mix.shape[1] != T:
        raise SeriesLengthMismatch(f"load has {T} slots, app_mix has {mix.shape[1]}")
    if mix.shape[0] == 1 and N > 1:
        mix = np.repeat(mix, N, axis=0)
    if mix.shape[0] != N:
        raise SeriesLengthMismatch(f"load has {N} stations, app_mix has {mix.shape[0]}")
    if (load < 0).any() or (load > 1).any() or (mix < 0).any() or (mix > 1).any():
        raise ValueError("load and app_mix must lie in [0, 1]")
    hist = None
    if history is not None:
        hist = _as_2d(history, "history")
        if hist.shape[0] == 1 and N > 1:
            hist = np.repeat(hist, N, axis=0)
        if hist.shape[0] != N:
            raise SeriesLengthMismatch("history must cover every station")

    M, C = station.max_channels, station.max_carriers
    reduced = np.zeros((N, T), dtype=bool)
    if policy.kind is EsKind.STATIC_THRESHOLD:
        start = 0 if hist is None else hist.shape[1]
        slot_of_day = (start + np.arange(T)) % station.slots_per_day
        reduced = _in_window(slot_of_day, policy.window)[None, :] & (load < policy.threshold)
    elif policy.kind in (EsKind.PREDICTIVE, EsKind.SERVICE_AWARE):
        reduced = predictive_mask(load, hist, policy, station)

    carried = load.copy()
    silent = np.zeros((N, T), dtype=bool)
    deferrals: list[Deferral] = []
    if policy.kind is EsKind.SERVICE_AWARE:
        for n in range(N):
            carried[n], silent[n], d = _aggregate(load[n], mix[n], policy, station, n)
            deferrals.extend(d)
        # the slot receiving the aggregate keeps the reduced setup only if it still fits
        reduced &= carried <= station.reduced_capacity

    channels = np.where(reduced, station.reduced_channels, M).astype(np.int64)
    carriers = np.where(reduced, station.reduced_carriers, C).astype(np.int64)
    channels[silent] = 0
    carriers[silent] = 0
    power = np.zeros((N, T))
    on = channels > 0
    power[on] = station.max_tx_power * np.minimum(1.0, carried[on] * M / channels[on])
    return ActivityTrace(channels, carriers, power, station.slot_seconds, M, C,
                         carried_load=carried, deferrals=deferrals)


def qos_violations(trace: ActivityTrace, app_mix, policy: EsPolicy,
                   station: StationConfig | None = None) -> list[str]:
    """Every breach of the deferral guard and every slot asked to carry more than it can."""
    station = station or StationConfig()
    mix = _as_2d(app_mix, "app_mix")
    if mix.shape[0] == 1 and trace.shape[0] > 1:
        mix = np.repeat(mix, trace.shape[0], axis=0)
    out = []
    for d in trace.deferrals:
        if mix[d.station, d.from_slot] < 1.0:
            out.append(f"station {d.station} slot {d.from_slot}: delay-sensitive traffic deferred")
        if d.delay_seconds > policy.tolerance_seconds:
            out.append(f"station {d.station} slot {d.from_slot}: deferred {d.delay_seconds}s")
    if trace.carried_load is not None:
        cap = trace.channels / trace.max_channels
        over = np.argwhere(trace.carried_load > cap + 1e-12)
        for n, t in over:
            out.append(f"station {n} slot {t}: load {trace.carried_load[n, t]:.3f} over capacity {cap[n, t]:.3f}")
    return out
