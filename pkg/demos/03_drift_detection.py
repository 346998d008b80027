"""
Six weeks later: finding out what rotted
========================================

Register a five-resource aggregation, let the simulated web change under
it, and open a curation session.  Each resource is fetched again and its
content compared with the stored fingerprint; the session sorts them
into ok, minor change, significant change, missing, and wrong content.
"""

import tempfile
from datetime import datetime, timedelta, timezone

from remcurator import (
    AREntry,
    Curator,
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
Harmonic tide predictions for the inlet gauge station. High water
intervals shift twelve minutes per day and the spring range reaches
two meters across the shoals.""")

LOGBOOK_V1 = page("Station logbook", """
Daily logbook of the estuary field station. Salinity at the north
channel held at 28 psu through the neap tide while sandpiper counts
rose after the storm reworked the outer bar near the jetty.""")
# one appended sentence: a minor change, most shingles survive
LOGBOOK_V2 = page("Station logbook", """
Daily logbook of the estuary field station. Salinity at the north
channel held at 28 psu through the neap tide while sandpiper counts
rose after the storm reworked the outer bar near the jetty.
Banding resumed on Thursday with twelve recaptures.""")

GLOSSARY_V1 = page("Estuary glossary", """
Glossary of estuary terms. Fetch is the open water distance wind
blows over. A spit is a ridge of sand extending from shore. Neap
tides show the smallest range of the lunar month.""")
# mostly rewritten: a significant change, still the same subject
GLOSSARY_V2 = page("Estuary glossary", """
Glossary of estuary terms, revised and expanded for the fall survey
crews. Entries now cover bedload, brackish mixing zones, flood deltas,
longshore drift, and the full tidal datum vocabulary.""")

SEDIMENT = page("Sediment report", """
Grain size distributions for the outer bar transects. Median diameters
coarsen seaward; mud fraction collects in the dredged channel.""")

PLUME_V1 = page("Plume survey", """
Aerial survey of the river plume front. Chlorophyll peaks track the
freshwater lens; drifters crossed the front at flood tide.""")
# the domain lapsed and a squatter page answers now
PLUME_PARKED = page("Domain for sale", """
This premium domain name is available for purchase. Click here to make
an offer through our brokerage partners today.""")

ENTRIES = [
    ("tides", "http://noaa.example/tides/8661070", [(START, Serve(TIDES))]),
    ("logbook", "http://station.example/logbook",
     [(START, Serve(LOGBOOK_V1)), (LATER - timedelta(days=3), Serve(LOGBOOK_V2))]),
    ("glossary", "http://station.example/glossary",
     [(START, Serve(GLOSSARY_V1)), (LATER - timedelta(days=10), Serve(GLOSSARY_V2))]),
    ("sediment", "http://usgs.example/sediment/ob-2008",
     [(START, Serve(SEDIMENT)), (LATER - timedelta(days=20), Gone())]),
    ("plume", "http://plumewatch.example/survey",
     [(START, Serve(PLUME_V1)), (LATER - timedelta(days=5), Serve(PLUME_PARKED))]),
]

doc = ResourceMapDoc(
    rem_uri="http://station.example/reading/rem.atom",
    aggregation_uri="http://station.example/reading/aggregation",
    title="Shorebird reading list",
    authors=("R. Alvarez",),
    updated=START,
    entries=tuple(
        AREntry(f"tag:station.example,2008:{name}", uri, title=name.capitalize(),
                updated=START)
        for name, uri, _ in ENTRIES
    ),
)

clock = SimulatedClock(START)
web = SimulatedWeb(clock)
web.add(ScriptedResource(doc.rem_uri, [
    TimelineEntry(START, Serve(serialize_rem(doc), "application/atom+xml"))]))
for _, uri, timeline in ENTRIES:
    web.add(ScriptedResource(uri, [TimelineEntry(at, b) for at, b in timeline]))

registry = WIRegistry(clock)
registry.add(SimulatedMember(MemberConfig("webcite", MemberKind.ARCHIVE).descriptor(), clock))

curator = Curator(tempfile.mkdtemp(prefix="remcurator-demo-"), registry, web, clock=clock)
result = curator.register(doc.rem_uri, actor="rosa")
print("registered", result.rem_key, "with", len(doc.entries), "resources at", clock.now().date())

clock.set_now(LATER)
session = curator.open_session(result.rem_key, actor="rosa")
print("session", session.session_id, "opened at", clock.now().date())
print()
print(f"{'resource':<10} {'state':<16} {'reason':<24} similarity")
for status in session.statuses:
    name = status.entry_id.rsplit(":", 1)[-1]
    sim = "-" if status.similarity is None else f"{status.similarity:.3f}"
    print(f"{name:<10} {status.state.value:<16} {status.reason.value if status.reason else '-':<24} {sim}")

print()
print("awaiting a decision:", [s.entry_id.rsplit(':', 1)[-1] for s in session.attention()])
