"""Wall and simulated clocks.

Everything that needs the current time takes a clock object so that
scenario tests can replay event schedules at exact instants.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def parse_rfc3339(text: str) -> datetime:
    """Parse an RFC-3339 timestamp into an aware UTC datetime."""
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    dt = datetime.fromisoformat(raw)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp has no UTC offset: {text!r}")
    return dt.astimezone(timezone.utc)


def format_rfc3339(dt: datetime) -> str:
    """Format an aware datetime as RFC-3339 in UTC ('Z' suffix)."""
    if dt.tzinfo is None:
        raise ValueError("naive datetime cannot be formatted as RFC-3339")
    dt = dt.astimezone(timezone.utc)
    if dt.microsecond:
        return dt.strftime("%Y-%m-%dT%H:%M:%S.%fZ")
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


class WallClock:
    """Real time."""

    def now(self) -> datetime:
        return utcnow()


class SimulatedClock:
    """Clock whose time only moves when told to."""

    def __init__(self, start: datetime):
        if start.tzinfo is None:
            raise ValueError("simulated clock start must be timezone-aware")
        self._now = start.astimezone(timezone.utc)

    def now(self) -> datetime:
        return self._now

    def advance(self, delta: timedelta | float) -> None:
        if not isinstance(delta, timedelta):
            delta = timedelta(seconds=delta)
        if delta < timedelta(0):
            raise ValueError("clock cannot move backwards")
        self._now += delta

    def set_now(self, at: datetime) -> None:
        if at.tzinfo is None:
            raise ValueError("simulated time must be timezone-aware")
        at = at.astimezone(timezone.utc)
        if at < self._now:
            raise ValueError("clock cannot move backwards")
        self._now = at
