"""
One lane per resource: the change timeline
==========================================

Every registration and every finalized decision leaves an event on the
Resource Map's timeline.  Exported, the timeline groups events into one
lane per aggregated resource, ordered by each lane's first event, which
is exactly the shape a dashboard wants to draw.
"""

import tempfile
from datetime import datetime, timedelta, timezone

from remcurator import (
    AREntry,
    Curator,
    DecisionKind,
    Gone,
    MemberKind,
    ResourceMapDoc,
    ScriptedResource,
    Serve,
    SimulatedClock,
    SimulatedMember,
    SimulatedWeb,
    TimelineEntry,
    WIRegistry,
    serialize_rem,
)
from remcurator.config import MemberConfig

START = datetime(2008, 8, 1, tzinfo=timezone.utc)
LATER = START + timedelta(weeks=6)


def page(title, body):
    return f"<html><title>{title}</title><body>{body}</body></html>".encode()


TIDES = page("Tide predictions", """
Harmonic tide predictions for the inlet gauge station, with high water
intervals shifting twelve minutes per day across the shoals.""")

FIELDGUIDE = page("Field guide", """
Field guide to shorebirds of the estuary. Plumage keys separate the
dowitchers by bill shape; juvenile plovers show buffy fringes.""")

APPENDIX = page("Appendix", """
Appendix of aging and sexing criteria retired from the field guide,
kept while crews still used the old worksheets.""")

LOGBOOK_V1 = page("Station logbook", """
Daily logbook of the estuary field station. Salinity at the north
channel held at 28 psu through the neap tide while sandpiper counts
rose after the storm reworked the outer bar near the jetty.""")
LOGBOOK_V2 = page("Station logbook", """
Daily logbook of the estuary field station. Salinity at the north
channel held at 28 psu through the neap tide while sandpiper counts
rose after the storm reworked the outer bar near the jetty.
Banding resumed on Thursday with twelve recaptures.""")

OLD_HOME = "http://birdnotes.example/guide"
NEW_HOME = "http://shorebirds.example/fieldguide"

doc = ResourceMapDoc(
    rem_uri="http://station.example/reading/rem.atom",
    aggregation_uri="http://station.example/reading/aggregation",
    title="Shorebird reading list",
    authors=("R. Alvarez",),
    updated=START,
    entries=(
        AREntry("tag:station.example,2008:tides", "http://noaa.example/tides/8661070",
                title="Tide predictions", updated=START),
        AREntry("tag:station.example,2008:fieldguide", OLD_HOME,
                title="Field guide", updated=START),
        AREntry("tag:station.example,2008:appendix", "http://birdnotes.example/appendix",
                title="Appendix", updated=START),
        AREntry("tag:station.example,2008:logbook", "http://station.example/logbook",
                title="Station logbook", updated=START),
    ),
)

clock = SimulatedClock(START)
web = SimulatedWeb(clock)
web.add(ScriptedResource(doc.rem_uri, [
    TimelineEntry(START, Serve(serialize_rem(doc), "application/atom+xml"))]))
web.add(ScriptedResource("http://noaa.example/tides/8661070", [
    TimelineEntry(START, Serve(TIDES))]))
web.add(ScriptedResource(OLD_HOME, [
    TimelineEntry(START, Serve(FIELDGUIDE)), TimelineEntry(LATER - timedelta(days=9), Gone())]))
web.add(ScriptedResource(NEW_HOME, [
    TimelineEntry(LATER - timedelta(days=9), Serve(FIELDGUIDE))]))
web.add(ScriptedResource("http://birdnotes.example/appendix", [
    TimelineEntry(START, Serve(APPENDIX)), TimelineEntry(LATER - timedelta(days=9), Gone())]))
web.add(ScriptedResource("http://station.example/logbook", [
    TimelineEntry(START, Serve(LOGBOOK_V1)), TimelineEntry(LATER - timedelta(days=3), Serve(LOGBOOK_V2))]))

registry = WIRegistry(clock)
registry.add(SimulatedMember(MemberConfig("webcite", MemberKind.ARCHIVE).descriptor(), clock))
curator = Curator(tempfile.mkdtemp(prefix="remcurator-demo-"), registry, web, clock=clock)

key = curator.register(doc.rem_uri, actor="rosa").rem_key
clock.set_now(LATER)
session = curator.open_session(key, actor="rosa")
curator.apply_decision(session, "tag:station.example,2008:fieldguide",
                       DecisionKind.RELOCATE, "rosa", new_uri=NEW_HOME)
curator.apply_decision(session, "tag:station.example,2008:appendix",
                       DecisionKind.FLAG_GONE, "rosa")
curator.apply_decision(session, "tag:station.example,2008:logbook",
                       DecisionKind.ACCEPT_MINOR, "rosa")
curator.finalize(session)

export = curator.export_timeline(key)
print("timeline for", export["rem_key"])
for lane in export["entries"]:
    name = lane["entry_id"].rsplit(":", 1)[-1]
    print()
    print(f"  {name}  ({lane['ar_uri']})")
    for event in lane["events"]:
        print(f"    {event['at'][:10]}  {event['label']}")

# lanes keep their own pace: the tides page never needed anything after
# its first capture, while the field guide lane records the move
