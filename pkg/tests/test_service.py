"""HTTP surface: routes, status codes, and the polling session flow."""

import time
from datetime import timedelta
from types import SimpleNamespace

import pytest
from fastapi.testclient import TestClient

from remcurator.config import Runtime, ServiceConfig
from remcurator.curator import Curator
from remcurator.ore import serialize_rem
from remcurator.service import create_app
from remcurator.webfetch import Gone, ScriptedResource, Serve, TimelineEntry

from support import make_doc, simple_world, utc

START = utc(2008, 8, 1)
LATER = utc(2008, 8, 15)
REM_URI = "http://test.example/rem.atom"
E1 = "tag:test,2008:e1"
E2 = "tag:test,2008:e2"


def text(tag: str, n: int = 40) -> str:
    return " ".join(f"{tag}{i:02d}" for i in range(n))


@pytest.fixture
def svc(tmp_path):
    clock, web, registry = simple_world(START)
    curator = Curator(tmp_path / "store", registry, web, clock=clock)
    runtime = Runtime(
        config=ServiceConfig(), clock=clock, fetcher=web, registry=registry, curator=curator
    )
    client = TestClient(create_app(runtime))
    return SimpleNamespace(client=client, clock=clock, web=web, registry=registry, curator=curator)


def serve_stable_world(svc, entry_count: int = 2):
    """Map plus pages that keep serving; entry 1 dies at LATER."""
    doc = make_doc(entry_count=entry_count)
    svc.web.add(
        ScriptedResource(
            REM_URI,
            [TimelineEntry(START, Serve(serialize_rem(doc), "application/atom+xml"))],
        )
    )
    for n, entry in enumerate(doc.entries, start=1):
        steps = [TimelineEntry(START, Serve(f"<p>{text(f'e{n}x')}</p>".encode()))]
        if n == 1:
            steps.append(TimelineEntry(LATER, Gone()))
        svc.web.add(ScriptedResource(entry.ar_uri, steps))
    return doc


def register(svc) -> str:
    serve_stable_world(svc)
    response = svc.client.post("/rems", json={"uri": REM_URI, "actor": "casey"})
    assert response.status_code == 201
    return response.json()["rem_key"]


def open_session(svc, key: str, wait: bool = True) -> dict:
    response = svc.client.post(f"/rems/{key}/sessions", json={"actor": "casey", "wait": wait})
    assert response.status_code == 201
    return response.json()


# -- registration ------------------------------------------------------------


def test_register_by_uri(svc):
    serve_stable_world(svc)
    response = svc.client.post("/rems", json={"uri": REM_URI, "actor": "casey"})
    assert response.status_code == 201
    body = response.json()
    assert body["rev_id"] == 1
    assert body["ar_results"] == {E1: "ok", E2: "ok"}


def test_register_by_raw_atom_body(svc):
    doc = serve_stable_world(svc)
    response = svc.client.post(
        "/rems",
        content=serialize_rem(doc),
        headers={"content-type": "application/atom+xml"},
    )
    assert response.status_code == 201
    assert response.json()["rev_id"] == 1


def test_register_rejects_bodies_without_a_source(svc):
    assert svc.client.post("/rems", json={}).status_code == 400
    assert svc.client.post("/rems", json={"actor": "x"}).status_code == 400
    response = svc.client.post("/rems", content=b"not json")
    assert response.status_code == 400
    assert "JSON" in response.json()["error"]


def test_register_maps_domain_errors_to_http_codes(svc):
    assert svc.client.post("/rems", json={"uri": "http://dead.example/x"}).status_code == 400
    serve_stable_world(svc)
    assert svc.client.post("/rems", json={"uri": REM_URI}).status_code == 201
    assert svc.client.post("/rems", json={"uri": REM_URI}).status_code == 409
    assert svc.client.post("/rems", json={"atom": "<feed"}).status_code == 400


def test_listing_and_info(svc):
    assert svc.client.get("/rems").json() == {"rems": []}
    key = register(svc)
    listed = svc.client.get("/rems").json()["rems"]
    assert [r["rem_key"] for r in listed] == [key]
    info = svc.client.get(f"/rems/{key}").json()
    assert info["rem_uri"] == REM_URI
    assert info["head_rev"] == 1
    assert len(info["entries"]) == 2
    assert svc.client.get("/rems/feedbeef00000000").status_code == 404


# -- sessions ----------------------------------------------------------------


def test_waited_session_comes_back_resolved(svc):
    key = register(svc)
    svc.clock.advance(timedelta(days=1))
    session = open_session(svc, key)
    assert session["state"] == "open"
    assert session["attention"] == []
    assert {s["state"] for s in session["statuses"]} == {"ok"}
    assert session["final_rev"] is None


def test_background_session_is_pollable(svc):
    key = register(svc)
    svc.clock.advance(timedelta(days=1))
    first = open_session(svc, key, wait=False)
    assert first["state"] in ("pending", "open")
    deadline = time.monotonic() + 5.0
    while time.monotonic() < deadline:
        view = svc.client.get(f"/sessions/{first['session_id']}").json()
        if view["state"] == "open":
            break
        time.sleep(0.01)
    assert view["state"] == "open"
    assert {s["state"] for s in view["statuses"]} == {"ok"}


def test_session_routes_reject_unknowns(svc):
    assert svc.client.post("/rems/feedbeef00000000/sessions", json={}).status_code == 404
    assert svc.client.get("/sessions/s9999").status_code == 404


# -- attention and decisions -------------------------------------------------


def test_attention_aid_over_http(svc):
    key = register(svc)
    svc.clock.set_now(LATER)
    session = open_session(svc, key)
    assert session["attention"] == [E1]
    aid = svc.client.get(f"/sessions/{session['session_id']}/attention/{E1}").json()
    assert aid["entry_id"] == E1
    assert aid["ar_uri"] == "http://test.example/res/1"
    assert aid["queries"][0] == '"Resource 1"'
    assert len(aid["signature"]) == 5
    assert aid["wi_copies"][0]["member_id"] == "arch"
    assert aid["last_known_at"] == "2008-08-01T00:00:00Z"
    ok_entry = svc.client.get(f"/sessions/{session['session_id']}/attention/{E2}")
    assert ok_entry.status_code == 409


def test_decision_and_finalize_flow(svc):
    key = register(svc)
    svc.clock.set_now(LATER)
    session = open_session(svc, key)
    sid = session["session_id"]
    decided = svc.client.post(
        f"/sessions/{sid}/decisions",
        json={"entry_id": E1, "kind": "flag-gone", "actor": "casey"},
    )
    assert decided.status_code == 200
    body = decided.json()
    assert body["attention"] == []
    assert body["decisions"][0]["kind"] == "flag-gone"
    closed = svc.client.post(f"/sessions/{sid}/finalize", json={"actor": "casey"})
    assert closed.status_code == 200
    assert closed.json()["rev_id"] == 2
    assert closed.json()["committed"] is True
    assert closed.json()["session"]["state"] == "closed"
    assert svc.client.post(f"/sessions/{sid}/finalize", json={}).status_code == 409
    again = svc.client.post(
        f"/sessions/{sid}/decisions", json={"entry_id": E1, "kind": "flag-gone"}
    )
    assert again.status_code == 409


def test_quiet_finalize_reports_no_commit(svc):
    key = register(svc)
    svc.clock.advance(timedelta(days=1))
    session = open_session(svc, key)
    closed = svc.client.post(f"/sessions/{session['session_id']}/finalize", json={})
    assert closed.json() == {
        "rev_id": 1,
        "committed": False,
        "session": closed.json()["session"],
    }


def test_finalize_refuses_open_attention_over_http(svc):
    key = register(svc)
    svc.clock.set_now(LATER)
    session = open_session(svc, key)
    response = svc.client.post(f"/sessions/{session['session_id']}/finalize", json={})
    assert response.status_code == 409
    assert E1 in response.json()["error"]


def test_decision_validation_errors(svc):
    key = register(svc)
    svc.clock.set_now(LATER)
    sid = open_session(svc, key)["session_id"]
    post = lambda body: svc.client.post(f"/sessions/{sid}/decisions", json=body)
    assert post({"kind": "flag-gone"}).status_code == 400
    assert post({"entry_id": E1}).status_code == 400
    assert post({"entry_id": E1, "kind": "shrug"}).status_code == 400
    assert post({"entry_id": E1, "kind": "relocate"}).status_code == 400
    assert post({"entry_id": E2, "kind": "flag-gone"}).status_code == 409
    fetch_failed = post(
        {"entry_id": E1, "kind": "relocate", "new_uri": "http://dead.example/y"}
    )
    assert fetch_failed.status_code == 409


# -- history, rollback, timeline ---------------------------------------------


def finalized_flag_gone(svc):
    key = register(svc)
    svc.clock.set_now(LATER)
    sid = open_session(svc, key)["session_id"]
    svc.client.post(f"/sessions/{sid}/decisions", json={"entry_id": E1, "kind": "flag-gone"})
    svc.client.post(f"/sessions/{sid}/finalize", json={"actor": "casey"})
    return key


def test_history_and_revision_fetch(svc):
    key = finalized_flag_gone(svc)
    history = svc.client.get(f"/rems/{key}/history").json()
    assert [r["rev_id"] for r in history["revisions"]] == [1, 2]
    assert history["revisions"][0]["note"] == "registered"
    head = svc.client.get(f"/rems/{key}/revisions/head").json()
    assert head["rev_id"] == 2
    first = svc.client.get(f"/rems/{key}/revisions/1").json()
    assert first["snapshot"].startswith("<?xml")
    assert svc.client.get(f"/rems/{key}/revisions/99").status_code == 404
    assert svc.client.get(f"/rems/{key}/revisions/abc").status_code == 400
    assert svc.client.get("/rems/feedbeef00000000/history").status_code == 404


def test_rollback_route(svc):
    key = finalized_flag_gone(svc)
    response = svc.client.post(f"/rems/{key}/rollback", json={"target": 1, "actor": "casey"})
    assert response.status_code == 200
    assert response.json()["rev_id"] == 3
    assert response.json()["change_kinds"] == ["rollback"]
    assert svc.client.post(f"/rems/{key}/rollback", json={"target": 3}).status_code == 409
    assert svc.client.post(f"/rems/{key}/rollback", json={}).status_code == 400
    assert svc.client.post(f"/rems/{key}/rollback", json={"target": "x"}).status_code == 400


def test_timeline_route(svc):
    key = finalized_flag_gone(svc)
    exported = svc.client.get(f"/rems/{key}/timeline").json()
    assert exported["rem_key"] == key
    lane = [l for l in exported["entries"] if l["entry_id"] == E1][0]
    assert [e["kind"] for e in lane["events"]] == ["first-archived", "flagged-gone"]
