"""Builders shared across the test modules."""

from __future__ import annotations

from datetime import datetime, timezone

from remcurator.clock import SimulatedClock
from remcurator.ore import AREntry, ResourceMapDoc
from remcurator.webfetch import ScriptedResource, Serve, SimulatedWeb, TimelineEntry
from remcurator.wi import Capability, MemberKind, SimulatedMember, WIMemberDescriptor, WIRegistry

ARCHIVE_CAPS = frozenset({Capability.PUSH, Capability.LOOKUP, Capability.HOLDINGS})
CACHE_CAPS = frozenset({Capability.LOOKUP})
SEARCH_CAPS = frozenset({Capability.SEARCH})


def utc(*args) -> datetime:
    return datetime(*args, tzinfo=timezone.utc)


def make_entry(n: int = 1, **overrides) -> AREntry:
    fields = {
        "entry_id": f"tag:test,2008:e{n}",
        "ar_uri": f"http://test.example/res/{n}",
        "media_type": "text/html",
        "title": f"Resource {n}",
        "updated": utc(2008, 7, 1, 12, 0, 0),
    }
    fields.update(overrides)
    return AREntry(**fields)


def make_doc(entry_count: int = 2, **overrides) -> ResourceMapDoc:
    fields = {
        "rem_uri": "http://test.example/rem.atom",
        "aggregation_uri": "http://test.example/rem.atom#aggregation",
        "title": "Test aggregation",
        "authors": ("Pat Example",),
        "updated": utc(2008, 7, 1, 12, 0, 0),
        "entries": tuple(make_entry(n) for n in range(1, entry_count + 1)),
    }
    fields.update(overrides)
    return ResourceMapDoc(**fields)


def archive_member(member_id: str, clock, lag=None) -> SimulatedMember:
    from datetime import timedelta

    descriptor = WIMemberDescriptor(
        member_id, MemberKind.ARCHIVE, ARCHIVE_CAPS, lag or timedelta(0)
    )
    return SimulatedMember(descriptor, clock)


def cache_member(member_id: str, clock) -> SimulatedMember:
    return SimulatedMember(WIMemberDescriptor(member_id, MemberKind.CACHE, CACHE_CAPS), clock)


def search_member(member_id: str, clock) -> SimulatedMember:
    return SimulatedMember(WIMemberDescriptor(member_id, MemberKind.SEARCH, SEARCH_CAPS), clock)


def serve_forever(uri: str, content: bytes, start: datetime, media_type: str = "text/html") -> ScriptedResource:
    return ScriptedResource(uri, [TimelineEntry(start, Serve(content, media_type))])


def simple_world(start: datetime):
    """A clock, empty simulated web, and a one-archive registry."""
    clock = SimulatedClock(start)
    web = SimulatedWeb(clock)
    registry = WIRegistry(clock)
    registry.add(archive_member("arch", clock))
    return clock, web, registry
