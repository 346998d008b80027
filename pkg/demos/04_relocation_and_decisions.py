"""
Repairing rot: the relocation aid and the four decisions
========================================================

A moved page leaves no forwarding address.  The session hands the
curator everything the infrastructure knows: archived copies, the last
good capture's lexical signature, and ready-made search queries.  Here
the queries actually find the new home, and the curator resolves every
flagged resource with one of the four decisions before committing.
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


FIELDGUIDE = page("Field guide", """
Field guide to shorebirds of the estuary. Plumage keys separate the
dowitchers by bill shape; juvenile plovers show buffy fringes through
September. Range maps cover both flyways.""")

APPENDIX = page("Appendix", """
Appendix of aging and sexing criteria retired from the field guide,
kept for reference while crews used the old worksheets.""")

LOGBOOK_V1 = page("Station logbook", """
Daily logbook of the estuary field station. Salinity at the north
channel held at 28 psu through the neap tide while sandpiper counts
rose after the storm reworked the outer bar near the jetty.""")
LOGBOOK_V2 = page("Station logbook", """
Daily logbook of the estuary field station. Salinity at the north
channel held at 28 psu through the neap tide while sandpiper counts
rose after the storm reworked the outer bar near the jetty.
Banding resumed on Thursday with twelve recaptures.""")

GLOSSARY_V1 = page("Estuary glossary", """
Glossary of estuary terms. Fetch is the open water distance wind
blows over. A spit is a ridge of sand extending from shore.""")
GLOSSARY_V2 = page("Estuary glossary", """
Glossary of estuary terms, rewritten for the fall survey crews with
bedload, brackish mixing, flood deltas, and the tidal datum entries.""")

OLD_HOME = "http://birdnotes.example/guide"
NEW_HOME = "http://shorebirds.example/fieldguide"

doc = ResourceMapDoc(
    rem_uri="http://station.example/reading/rem.atom",
    aggregation_uri="http://station.example/reading/aggregation",
    title="Shorebird reading list",
    authors=("R. Alvarez",),
    updated=START,
    entries=(
        AREntry("tag:station.example,2008:fieldguide", OLD_HOME,
                title="Field guide", updated=START),
        AREntry("tag:station.example,2008:appendix", "http://birdnotes.example/appendix",
                title="Appendix", updated=START),
        AREntry("tag:station.example,2008:logbook", "http://station.example/logbook",
                title="Station logbook", updated=START),
        AREntry("tag:station.example,2008:glossary", "http://station.example/glossary",
                title="Estuary glossary", updated=START),
    ),
)

clock = SimulatedClock(START)
web = SimulatedWeb(clock)
web.add(ScriptedResource(doc.rem_uri, [
    TimelineEntry(START, Serve(serialize_rem(doc), "application/atom+xml"))]))
web.add(ScriptedResource(OLD_HOME, [
    TimelineEntry(START, Serve(FIELDGUIDE)), TimelineEntry(LATER - timedelta(days=9), Gone())]))
web.add(ScriptedResource(NEW_HOME, [
    TimelineEntry(LATER - timedelta(days=9), Serve(FIELDGUIDE))]))
web.add(ScriptedResource("http://birdnotes.example/appendix", [
    TimelineEntry(START, Serve(APPENDIX)), TimelineEntry(LATER - timedelta(days=9), Gone())]))
web.add(ScriptedResource("http://station.example/logbook", [
    TimelineEntry(START, Serve(LOGBOOK_V1)), TimelineEntry(LATER - timedelta(days=3), Serve(LOGBOOK_V2))]))
web.add(ScriptedResource("http://station.example/glossary", [
    TimelineEntry(START, Serve(GLOSSARY_V1)), TimelineEntry(LATER - timedelta(days=10), Serve(GLOSSARY_V2))]))

registry = WIRegistry(clock)
registry.add(SimulatedMember(MemberConfig("webcite", MemberKind.ARCHIVE).descriptor(), clock))
finder = SimulatedMember(MemberConfig("finder", MemberKind.SEARCH).descriptor(), clock)
registry.add(finder)

curator = Curator(tempfile.mkdtemp(prefix="remcurator-demo-"), registry, web, clock=clock)
key = curator.register(doc.rem_uri, actor="rosa").rem_key

clock.set_now(LATER)
# the search member crawled the page at its new home in the meantime
finder.crawl(NEW_HOME, FIELDGUIDE, "text/html")

session = curator.open_session(key, actor="rosa")
flagged = [s.entry_id.rsplit(":", 1)[-1] for s in session.attention()]
print("attention:", flagged)

# -- the aid for the vanished field guide
aid = curator.attention_aid(session, "tag:station.example,2008:fieldguide")
print()
print("aid for", aid.ar_uri)
print("  last known good:", aid.last_known_at.date())
print("  signature:", " ".join(aid.signature))
for copy in aid.wi_copies:
    print("  archived copy:", copy.member_id, copy.archived_uri)
for query in aid.queries:
    print("  query:", query)

hits = registry.search(aid.queries[0])
print("searching the infrastructure:", hits)
new_uri = hits["finder"][0]

# -- one decision per flagged resource, then commit
curator.apply_decision(session, "tag:station.example,2008:fieldguide",
                       DecisionKind.RELOCATE, "rosa", new_uri=new_uri)
curator.apply_decision(session, "tag:station.example,2008:appendix",
                       DecisionKind.FLAG_GONE, "rosa")
curator.apply_decision(session, "tag:station.example,2008:logbook",
                       DecisionKind.ACCEPT_MINOR, "rosa")
curator.apply_decision(session, "tag:station.example,2008:glossary",
                       DecisionKind.REARCHIVE, "rosa")

revision = curator.finalize(session)
print()
print("committed revision", revision.rev_id, "changes:",
      [c.kind.value for c in revision.changes])

head = curator.store.get(key).doc()
moved = head.entry("tag:station.example,2008:fieldguide")
dead = head.entry("tag:station.example,2008:appendix")
print("field guide now points at", moved.ar_uri)
print("appendix flagged gone:", dead.flagged_gone)
