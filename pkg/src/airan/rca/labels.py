from __future__ import annotations

import enum
from dataclasses import dataclass


class RootCause(enum.Enum):
    WEAK_COVERAGE = "WEAK_COVERAGE"
    INTERFERENCE = "INTERFERENCE"
    HANDOVER_FAILURE = "HANDOVER_FAILURE"
    CONGESTION = "CONGESTION"
    NORMAL = "NORMAL"


class UserType(enum.Enum):
    INDOOR = "INDOOR"
    OUTDOOR = "OUTDOOR"
    HIGH_SPEED = "HIGH_SPEED"


ROOT_CAUSES = tuple(RootCause)
USER_TYPES = tuple(UserType)


@dataclass(frozen=True)
class RcaLabel:
    root_cause: RootCause
    user_type: UserType


def user_type_for(speed_kmh: float) -> UserType:
    if speed_kmh < 1.0:
        return UserType.INDOOR
    if speed_kmh <= 80.0:
        return UserType.OUTDOOR
    return UserType.HIGH_SPEED
