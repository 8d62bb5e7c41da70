from __future__ import annotations

import numpy as np


class InsufficientHistory(ValueError):
    pass


def predict_load(history, horizon_slots: int, period: int = 96, k: int = 3) -> np.ndarray:
    """Seasonal-naive forecast of the next ``horizon_slots`` slots.

    Slot ``t`` is predicted as the mean of the values at ``t - period``,
    ``t - 2*period``, ... over the last ``k`` observed periods.
    """
    h = np.asarray(history, dtype=np.float64)
    if h.ndim != 1:
        raise ValueError("history must be one-dimensional")
    if len(h) < period:
        raise InsufficientHistory(f"need at least {period} slots, got {len(h)}")
    if horizon_slots < 0 or k < 1:
        raise ValueError("horizon_slots must be non-negative and k positive")
    n = len(h)
    out = np.empty(horizon_slots)
    for i in range(horizon_slots):
        t = n + i
        vals = []
        j = 1
        while len(vals) < k and t - j * period >= 0:
            if t - j * period < n:
                vals.append(h[t - j * period])
            j += 1
        out[i] = np.mean(vals)
    return out


def rolling_forecast(history, series, period: int = 96, k: int = 3) -> np.ndarray:
    """One-slot-ahead seasonal-naive prediction for every slot of ``series``.

    Each prediction only looks at ``history`` and the slots of ``series``
    before it. Slots with no same-position value in the past get NaN.
    """
    full = np.concatenate([np.asarray(history, dtype=np.float64), np.asarray(series, dtype=np.float64)])
    start = len(full) - len(series)
    out = np.full(len(series), np.nan)
    for i in range(len(series)):
        t = start + i
        idx = [t - j * period for j in range(1, k + 1) if t - j * period >= 0]
        if idx:
            out[i] = full[idx].mean()
    return out


def diurnal_load(days: int, rng: np.random.Generator | None = None, slots_per_day: int = 96,
                 trough: float = 0.05, peak: float = 0.7, peak_hour: float = 16.0,
                 noise: float = 0.02) -> np.ndarray:
    """PRB-utilisation series with a daily cosine shape peaking at ``peak_hour``."""
    hours = (np.arange(days * slots_per_day) % slots_per_day) * 24.0 / slots_per_day
    shape = 0.5 * (1.0 + np.cos(2 * np.pi * (hours - peak_hour) / 24.0))
    load = trough + (peak - trough) * shape ** 2
    if rng is not None and noise > 0:
        load = load + rng.normal(scale=noise, size=load.shape)
    return np.clip(load, 0.0, 1.0)
