"""
The same workflow from the shell
================================

The `remcurator` command reads one INI config and prints tab-separated
lines, so the whole curation loop scripts cleanly.  Here each invocation
is the real CLI entry point called in process; a scenario file stands in
for the live web, and --now moves the simulated clock between calls.
"""

import io
import json
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from remcurator import AREntry, ResourceMapDoc, serialize_rem
from remcurator.cli import main

T1 = "2008-08-01T00:00:00Z"
T2 = "2008-09-12T00:00:00Z"

doc = ResourceMapDoc(
    rem_uri="http://station.example/reading/rem.atom",
    aggregation_uri="http://station.example/reading/aggregation",
    title="Survey shelf",
    authors=("R. Alvarez",),
    updated=datetime(2008, 8, 1, tzinfo=timezone.utc),
    entries=(
        AREntry("tag:station.example,2008:notes", "http://station.example/notes",
                title="Survey notes", updated=datetime(2008, 8, 1, tzinfo=timezone.utc)),
        AREntry("tag:station.example,2008:chart", "http://hydro.example/chart/12",
                title="Depth chart", updated=datetime(2008, 8, 1, tzinfo=timezone.utc)),
    ),
)
atom = serialize_rem(doc).decode("utf-8")

NOTES = "<html><title>Survey notes</title><body>Transect notes and shorebird counts.</body></html>"
CHART = "<html><title>Depth chart</title><body>Sounding chart of the inlet approaches.</body></html>"

# -- a working directory with the config, the scenario, and the map file
workdir = Path(tempfile.mkdtemp(prefix="remcurator-demo-"))
(workdir / "rem.atom").write_text(atom)
(workdir / "scenario.json").write_text(json.dumps({
    "resources": [
        {"uri": doc.rem_uri, "timeline": [
            {"effective_from": T1, "behavior": "serve",
             "content": atom, "media_type": "application/atom+xml"}]},
        {"uri": "http://station.example/notes", "timeline": [
            {"effective_from": T1, "behavior": "serve", "content": NOTES}]},
        {"uri": "http://hydro.example/chart/12", "timeline": [
            {"effective_from": T1, "behavior": "serve", "content": CHART},
            {"effective_from": "2008-08-20T00:00:00Z", "behavior": "gone"}]},
    ],
}))
(workdir / "config.ini").write_text(f"""[service]
storage = store
clock = simulated
sim_start = {T1}

[fetch]
script = scenario.json
""")


def run(*argv):
    out = io.StringIO()
    print("$ remcurator", " ".join(argv))
    code = main(["--config", str(workdir / "config.ini"), *argv], out=out)
    text = out.getvalue()
    print(text, end="")
    if code != 0:
        print(f"(exit {code})")
    print()
    return text


run("validate", str(workdir / "rem.atom"))
reg = run("register", doc.rem_uri, "--actor", "rosa")
key = reg.split("\t")[1]

check = run("--now", T2, "check", key, "--actor", "rosa")
sid = check.splitlines()[0].split("\t")[1]

run("--now", T2, "aid", sid, "tag:station.example,2008:chart")
run("--now", T2, "decide", sid, "tag:station.example,2008:chart", "flag-gone", "--actor", "rosa")
run("--now", T2, "finalize", sid, "--actor", "rosa")
run("history", key)
run("--now", T2, "timeline", key)
