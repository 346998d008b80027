"""Live-web retrieval: a real HTTP adapter and a scripted simulated web.

The simulated web drives every deterministic test: each resource carries a
timeline of behaviors (serve, gone, redirect) keyed to an injected clock,
so the same schedule of link rot and content drift replays bit-for-bit.
"""

from __future__ import annotations

import json
import logging
import threading
import time as _time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path

import requests

from remcurator.clock import WallClock, parse_rfc3339

log = logging.getLogger(__name__)

DEFAULT_DEADLINE = 10.0
DEFAULT_MAX_IN_FLIGHT = 8
MAX_REDIRECTS = 5


class FetchKind(str, Enum):
    OK = "ok"
    NOT_FOUND = "not-found"
    ERROR = "error"


@dataclass(frozen=True)
class FetchOutcome:
    kind: FetchKind
    fetched_at: datetime
    content: bytes = b""
    media_type: str = ""
    detail: str = ""

    @property
    def is_ok(self) -> bool:
        return self.kind is FetchKind.OK

    @classmethod
    def ok(cls, content: bytes, media_type: str, at: datetime) -> "FetchOutcome":
        # an Ok outcome always names a media type, even when the server did not
        return cls(FetchKind.OK, at, content=content, media_type=media_type or "application/octet-stream")

    @classmethod
    def not_found(cls, at: datetime) -> "FetchOutcome":
        return cls(FetchKind.NOT_FOUND, at)

    @classmethod
    def error(cls, detail: str, at: datetime) -> "FetchOutcome":
        return cls(FetchKind.ERROR, at, detail=detail)


@dataclass(frozen=True)
class Serve:
    content: bytes
    media_type: str = "text/html"
    latency: float = 0.0  # simulated seconds before the response lands


@dataclass(frozen=True)
class Gone:
    pass


@dataclass(frozen=True)
class Redirect:
    to: str


@dataclass(frozen=True)
class TimelineEntry:
    effective_from: datetime
    behavior: Serve | Gone | Redirect


@dataclass
class ScriptedResource:
    """One URI's scripted history on the simulated web."""

    uri: str
    timeline: list[TimelineEntry]

    def __post_init__(self) -> None:
        times = [e.effective_from for e in self.timeline]
        if any(b >= a for a, b in zip(times[1:], times)):
            raise ValueError(f"timeline for {self.uri} is not strictly ordered")

    def behavior_at(self, at: datetime) -> Serve | Gone | Redirect | None:
        active = None
        for entry in self.timeline:
            if entry.effective_from <= at:
                active = entry.behavior
            else:
                break
        return active


class FetchProbe:
    """Counters the simulated adapter keeps for concurrency assertions."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.in_flight = 0
        self.max_in_flight_observed = 0
        self.total = 0
        self.durations: list[float] = []  # simulated seconds, submission order

    def enter(self) -> None:
        with self._lock:
            self.in_flight += 1
            self.total += 1
            self.max_in_flight_observed = max(self.max_in_flight_observed, self.in_flight)

    def exit(self, duration: float) -> None:
        with self._lock:
            self.in_flight -= 1
            self.durations.append(duration)


class SimulatedWeb:
    """Scripted live web evaluated against an injected clock.

    Fetching is a pure function of (script, clock); ``real_delay`` adds a
    real-time sleep per request purely so concurrency tests can observe
    overlapping requests.
    """

    def __init__(self, clock, resources=(), real_delay: float = 0.0):
        self.clock = clock
        self.real_delay = real_delay
        self.probe = FetchProbe()
        self._resources: dict[str, ScriptedResource] = {}
        for r in resources:
            self.add(r)

    def add(self, resource: ScriptedResource) -> None:
        self._resources[resource.uri] = resource

    def fetch(self, uri: str, deadline: float = DEFAULT_DEADLINE) -> FetchOutcome:
        self.probe.enter()
        duration = 0.0
        try:
            if self.real_delay:
                _time.sleep(self.real_delay)
            now = self.clock.now()
            current = uri
            for _ in range(MAX_REDIRECTS + 1):
                resource = self._resources.get(current)
                behavior = resource.behavior_at(now) if resource else None
                if behavior is None or isinstance(behavior, Gone):
                    return FetchOutcome.not_found(now)
                if isinstance(behavior, Redirect):
                    current = behavior.to
                    continue
                duration = min(behavior.latency, deadline)
                if behavior.latency > deadline:
                    return FetchOutcome.error("timeout", now)
                return FetchOutcome.ok(behavior.content, behavior.media_type, now)
            return FetchOutcome.error("too many redirects", now)
        finally:
            self.probe.exit(duration)


class HttpFetcher:
    """Real-web adapter: one GET per fetch, following at most 5 redirects.

    Standard proxy environment variables are honored via requests.  Ships
    untested against live services; CI runs only the simulated web.
    """

    def __init__(self, clock=None):
        self.clock = clock or WallClock()
        self._session = requests.Session()
        self._session.max_redirects = MAX_REDIRECTS

    def fetch(self, uri: str, deadline: float = DEFAULT_DEADLINE) -> FetchOutcome:
        now = self.clock.now()
        try:
            response = self._session.get(uri, timeout=deadline, allow_redirects=True)
        except requests.Timeout:
            return FetchOutcome.error("timeout", now)
        except requests.TooManyRedirects:
            return FetchOutcome.error("too many redirects", now)
        except requests.RequestException as exc:
            return FetchOutcome.error(str(exc), now)
        if response.status_code in (404, 410):
            return FetchOutcome.not_found(now)
        if response.status_code >= 400:
            return FetchOutcome.error(f"http {response.status_code}", now)
        return FetchOutcome.ok(
            response.content, response.headers.get("Content-Type", ""), now
        )


def fetch_all(
    fetcher,
    uris,
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
    deadline: float = DEFAULT_DEADLINE,
) -> dict[str, FetchOutcome]:
    """Fetch every URI with at most ``max_in_flight`` requests outstanding.

    Returns one outcome per distinct input URI; result order follows the
    input, not completion order.  Slow servers surface as per-URI timeout
    errors, never as an exception.
    """
    if max_in_flight < 1:
        raise ValueError("max_in_flight must be at least 1")
    unique = list(dict.fromkeys(uris))
    if not unique:
        return {}
    results: dict[str, FetchOutcome] = {}
    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        futures = {uri: pool.submit(_safe_fetch, fetcher, uri, deadline) for uri in unique}
        for uri in unique:
            results[uri] = futures[uri].result()
    return results


def _safe_fetch(fetcher, uri: str, deadline: float) -> FetchOutcome:
    try:
        return fetcher.fetch(uri, deadline)
    except Exception as exc:  # the fetch contract is outcome-valued
        log.warning("fetch of %s raised unexpectedly: %s", uri, exc)
        return FetchOutcome.error(str(exc), fetcher.clock.now())


def load_script(path: str | Path, clock, real_delay: float = 0.0) -> SimulatedWeb:
    """Build a simulated web from a scenario script file.

    See docs/scenario-format.md for the schema.  ``content_path`` entries
    are resolved relative to the script file.
    """
    path = Path(path)
    data = json.loads(path.read_text("utf-8"))
    web = SimulatedWeb(clock, real_delay=real_delay)
    for res in data.get("resources", []):
        timeline = []
        for entry in res["timeline"]:
            at = parse_rfc3339(entry["effective_from"])
            kind = entry["behavior"]
            if kind == "serve":
                if "content_path" in entry:
                    content = (path.parent / entry["content_path"]).read_bytes()
                else:
                    content = entry.get("content", "").encode("utf-8")
                behavior: Serve | Gone | Redirect = Serve(
                    content,
                    entry.get("media_type", "text/html"),
                    float(entry.get("latency", 0.0)),
                )
            elif kind == "gone":
                behavior = Gone()
            elif kind == "redirect":
                behavior = Redirect(entry["to"])
            else:
                raise ValueError(f"unknown behavior {kind!r} in {path}")
            timeline.append(TimelineEntry(at, behavior))
        web.add(ScriptedResource(res["uri"], timeline))
    return web
