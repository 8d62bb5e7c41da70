"""Simulated time is an integer count of microseconds."""

SimTime = int

MICROSECOND: SimTime = 1
MILLISECOND: SimTime = 1_000
SECOND: SimTime = 1_000_000
MINUTE: SimTime = 60 * SECOND
HOUR: SimTime = 60 * MINUTE
DAY: SimTime = 24 * HOUR


def ms(value: float) -> SimTime:
    return int(round(value * MILLISECOND))


def seconds(value: float) -> SimTime:
    return int(round(value * SECOND))


def minutes(value: float) -> SimTime:
    return int(round(value * MINUTE))


def to_seconds(t: SimTime) -> float:
    return t / SECOND


def to_ms(t: SimTime) -> float:
    return t / MILLISECOND
