"""Noisy service perception: the classifier is modelled by its confusion structure."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class UnknownApp(LookupError):
    pass


# base air-interface latency per app at no load and good coverage, ms
DEFAULT_BASE_LATENCY = {
    "short_video": 20.0,
    "qr_code": 9.0,
    "web_browsing": 25.0,
    "video_call": 12.0,
    "cloud_gaming": 10.0,
    "live_stream": 18.0,
    "instant_messaging": 15.0,
    "file_download": 60.0,
    "software_update": 80.0,
    "iot_telemetry": 40.0,
}


@dataclass(frozen=True)
class AppCatalog:
    base_latency: dict = field(default_factory=lambda: dict(DEFAULT_BASE_LATENCY))

    @property
    def apps(self) -> tuple[str, ...]:
        return tuple(self.base_latency)

    def __contains__(self, app: str) -> bool:
        return app in self.base_latency

    def __len__(self):
        return len(self.base_latency)

    def index(self, app: str) -> int:
        try:
            return self.apps.index(app)
        except ValueError:
            raise UnknownApp(app) from None


DEFAULT_CATALOG = AppCatalog()


def perceive_traffic(true_app: str, accuracy: float, rng: np.random.Generator,
                     catalog: AppCatalog = DEFAULT_CATALOG) -> str:
    """Observed label: correct with probability ``accuracy``, else a uniform other app."""
    if not 0.0 <= accuracy <= 1.0:
        raise ValueError("accuracy must lie in [0, 1]")
    if true_app not in catalog:
        raise UnknownApp(true_app)
    if rng.random() < accuracy or len(catalog) == 1:
        return true_app
    others = [a for a in catalog.apps if a != true_app]
    return others[int(rng.integers(len(others)))]


def label_posterior(observed: str, accuracy: float, catalog: AppCatalog = DEFAULT_CATALOG) -> dict[str, float]:
    """P(true app | observed label) under a uniform prior and uniform confusion."""
    if observed not in catalog:
        raise UnknownApp(observed)
    k = len(catalog)
    if k == 1 or accuracy >= 1.0:
        return {observed: 1.0}
    other = (1.0 - accuracy) / (k - 1)
    return {a: (accuracy if a == observed else other) for a in catalog.apps}
