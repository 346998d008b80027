"""
Nothing is ever lost: revision history and rollback
===================================================

Every commit appends a full snapshot to the Resource Map's revision
log.  Rolling back does not erase the mistake; it appends one more
revision that restores the earlier snapshot, so the log still shows
what happened and when.
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
OUTAGE = START + timedelta(weeks=2)
BACK = START + timedelta(weeks=3)

NOTES = b"<html><title>Survey notes</title><body>Transect notes and counts.</body></html>"
CHART = b"<html><title>Depth chart</title><body>Sounding chart of the inlet approaches.</body></html>"

doc = ResourceMapDoc(
    rem_uri="http://station.example/reading/rem.atom",
    aggregation_uri="http://station.example/reading/aggregation",
    title="Survey shelf",
    authors=("R. Alvarez",),
    updated=START,
    entries=(
        AREntry("tag:station.example,2008:notes", "http://station.example/notes",
                title="Survey notes", updated=START),
        AREntry("tag:station.example,2008:chart", "http://hydro.example/chart/12",
                title="Depth chart", updated=START),
    ),
)

clock = SimulatedClock(START)
web = SimulatedWeb(clock)
web.add(ScriptedResource(doc.rem_uri, [
    TimelineEntry(START, Serve(serialize_rem(doc), "application/atom+xml"))]))
web.add(ScriptedResource("http://station.example/notes", [
    TimelineEntry(START, Serve(NOTES))]))
# the chart host goes dark for a week, then comes back unchanged
web.add(ScriptedResource("http://hydro.example/chart/12", [
    TimelineEntry(START, Serve(CHART)),
    TimelineEntry(OUTAGE, Gone()),
    TimelineEntry(BACK, Serve(CHART)),
]))

registry = WIRegistry(clock)
registry.add(SimulatedMember(MemberConfig("webcite", MemberKind.ARCHIVE).descriptor(), clock))
curator = Curator(tempfile.mkdtemp(prefix="remcurator-demo-"), registry, web, clock=clock)

key = curator.register(doc.rem_uri, actor="rosa").rem_key

# during the outage the chart looks dead and gets flagged
clock.set_now(OUTAGE + timedelta(days=2))
session = curator.open_session(key, actor="rosa")
curator.apply_decision(session, "tag:station.example,2008:chart",
                       DecisionKind.FLAG_GONE, "rosa")
curator.finalize(session)
print("flagged the chart during the outage; head is now revision",
      curator.store.head_id(key))

# the host comes back, so the flag was premature: roll back to revision 1
clock.set_now(BACK + timedelta(days=1))
rolled = curator.rollback(key, 1, actor="rosa")
print("rolled back; head is now revision", rolled.rev_id)
print()
print(curator.store.export_changelog(key))

head = curator.store.get(key)
r1 = curator.store.get(key, 1)
print("head snapshot matches revision 1 byte for byte:", head.snapshot == r1.snapshot)
print("chart flagged in head:", head.doc().entry("tag:station.example,2008:chart").flagged_gone)
print("revisions kept:", [r.rev_id for r in curator.store.history(key)])
