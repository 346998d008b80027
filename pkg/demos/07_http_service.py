"""
The same workflow over HTTP
===========================

Everything the library does is reachable as JSON routes, which is what
the browser dashboard consumes.  This walk drives the app in process
through a test client; `remcurator serve --config <ini>` runs the same
app on a real socket.
"""

import json
import tempfile
import warnings
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
from remcurator.config import MemberConfig, Runtime, ServiceConfig
from remcurator.service import create_app

# the test client still imports through a deprecated starlette shim
warnings.filterwarnings("ignore", message="Using `httpx`")
from fastapi.testclient import TestClient  # noqa: E402

START = datetime(2008, 8, 1, tzinfo=timezone.utc)
LATER = START + timedelta(weeks=6)

NOTES = b"<html><title>Survey notes</title><body>Transect notes and shorebird counts for the season.</body></html>"
CHART = b"<html><title>Depth chart</title><body>Sounding chart of the inlet approaches and shoals.</body></html>"

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
web.add(ScriptedResource("http://hydro.example/chart/12", [
    TimelineEntry(START, Serve(CHART)), TimelineEntry(START + timedelta(weeks=3), Gone())]))

registry = WIRegistry(clock)
registry.add(SimulatedMember(MemberConfig("webcite", MemberKind.ARCHIVE).descriptor(), clock))
curator = Curator(tempfile.mkdtemp(prefix="remcurator-demo-"), registry, web, clock=clock)
runtime = Runtime(config=ServiceConfig(), clock=clock, fetcher=web,
                  registry=registry, curator=curator)
client = TestClient(create_app(runtime))


def show(label, response):
    print(f"{label} -> {response.status_code}")
    print(" ", json.dumps(response.json())[:200])
    return response.json()


reg = show("POST /rems",
           client.post("/rems", json={"uri": doc.rem_uri, "actor": "rosa"}))
key = reg["rem_key"]

clock.set_now(LATER)
session = show(f"POST /rems/{key}/sessions",
               client.post(f"/rems/{key}/sessions", json={"actor": "rosa", "wait": True}))
sid = session["session_id"]
entry = session["attention"][0]

show(f"GET /sessions/{sid}/attention/...",
     client.get(f"/sessions/{sid}/attention/{entry}"))

show(f"POST /sessions/{sid}/decisions",
     client.post(f"/sessions/{sid}/decisions",
                 json={"entry_id": entry, "kind": "flag-gone", "actor": "rosa"}))

final = show(f"POST /sessions/{sid}/finalize",
             client.post(f"/sessions/{sid}/finalize", json={"actor": "rosa"}))
print("committed revision", final["rev_id"])

history = show(f"GET /rems/{key}/history", client.get(f"/rems/{key}/history"))
print("revisions:", [(r["rev_id"], r["note"]) for r in history["revisions"]])

timeline = show(f"GET /rems/{key}/timeline", client.get(f"/rems/{key}/timeline"))
for lane in timeline["entries"]:
    events = ", ".join(e["kind"] for e in lane["events"])
    print(" ", lane["entry_id"].rsplit(":", 1)[-1], "->", events)
