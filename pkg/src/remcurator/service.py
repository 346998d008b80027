"""HTTP service exposing the curator.

JSON in and out on every route; schemas are documented in
docs/http-api.md.  Resource checks run in a background thread per session
so clients can poll ``GET /sessions/{id}`` and watch statuses move from
pending to resolved.  All mutation funnels through one lock, matching the
curator's single-writer model.
"""

from __future__ import annotations

import logging
import threading

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from remcurator.clock import format_rfc3339
from remcurator.config import ServiceConfig, build_runtime
from remcurator.curator import (
    AlreadyRegistered,
    CurationSession,
    CuratorError,
    DecisionFetchFailed,
    DecisionKind,
    InvalidDecision,
    NotInAttention,
    NotRegistered,
    ParseFailure,
    RemUnavailable,
    SessionClosed,
    SessionPending,
    StaleSession,
    UnknownSession,
    UnresolvedAttention,
)
from remcurator.revisions import (
    RevisionError,
    StorageFailure,
    TargetIsHead,
    UnknownKey,
    UnknownRevision,
)

log = logging.getLogger(__name__)

DEFAULT_ACTOR = "anonymous"

_STATUS_CODES = [
    (NotRegistered, 404),
    (UnknownSession, 404),
    (UnknownKey, 404),
    (UnknownRevision, 404),
    (ParseFailure, 400),
    (RemUnavailable, 400),
    (InvalidDecision, 400),
    (AlreadyRegistered, 409),
    (TargetIsHead, 409),
    (SessionClosed, 409),
    (SessionPending, 409),
    (StaleSession, 409),
    (UnresolvedAttention, 409),
    (NotInAttention, 409),
    (DecisionFetchFailed, 409),
    (StorageFailure, 503),
]


def _status_code(exc: Exception) -> int:
    for kind, code in _STATUS_CODES:
        if isinstance(exc, kind):
            return code
    return 400


class BadRequest(Exception):
    pass


def _session_view(session: CurationSession) -> dict:
    if session.closed:
        state = "closed"
    elif session.resolved:
        state = "open"
    else:
        state = "pending"
    return {
        "session_id": session.session_id,
        "rem_key": session.rem_key,
        "actor": session.actor,
        "state": state,
        "rem_missing": session.rem_missing,
        "base_rev": session.base_rev,
        "final_rev": session.final_rev,
        "external_changes": [
            {
                "kind": c.kind.value,
                "entry_id": c.entry_id,
                "old_value": c.old_value,
                "new_value": c.new_value,
            }
            for c in session.external_changes
        ],
        "statuses": [s.to_dict() for s in session.statuses],
        "attention": [s.entry_id for s in session.attention()],
        "decisions": [d.to_dict() for d in session.decisions],
    }


def _aid_view(aid) -> dict:
    return {
        "entry_id": aid.entry_id,
        "ar_uri": aid.ar_uri,
        "title": aid.title,
        "wi_copies": [
            {
                "member_id": c.member_id,
                "archived_uri": c.archived_uri,
                "captured_at": format_rfc3339(c.captured_at),
            }
            for c in aid.wi_copies
        ],
        "queries": list(aid.queries),
        "signature": list(aid.signature),
        "text_snapshot": aid.text_snapshot,
        "thumbnail_ref": aid.thumbnail_ref,
        "last_known_at": format_rfc3339(aid.last_known_at) if aid.last_known_at else None,
    }


def create_app(runtime) -> FastAPI:
    app = FastAPI(title="remcurator", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.runtime = runtime
    app.state.lock = threading.RLock()
    app.state.sessions = {}

    curator = runtime.curator

    @app.exception_handler(CuratorError)
    @app.exception_handler(RevisionError)
    @app.exception_handler(BadRequest)
    async def _domain_error(request: Request, exc: Exception):
        return JSONResponse({"error": str(exc)}, status_code=_status_code(exc))

    async def _json_body(request: Request) -> dict:
        try:
            data = await request.json()
        except Exception:
            raise BadRequest("request body must be JSON")
        if not isinstance(data, dict):
            raise BadRequest("request body must be a JSON object")
        return data

    def _session(session_id: str) -> CurationSession:
        with app.state.lock:
            session = app.state.sessions.get(session_id)
            if session is None:
                session = curator.load_session(session_id)
                app.state.sessions[session_id] = session
            return session

    @app.post("/rems", status_code=201)
    async def register(request: Request):
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("application/atom+xml"):
            source: "str | bytes" = await request.body()
            actor = request.query_params.get("actor", DEFAULT_ACTOR)
        else:
            data = await _json_body(request)
            actor = data.get("actor", DEFAULT_ACTOR)
            if "atom" in data:
                source = str(data["atom"]).encode("utf-8")
            elif "uri" in data:
                source = str(data["uri"])
            else:
                raise BadRequest('body needs "uri" or "atom"')
        with app.state.lock:
            result = curator.register(source, actor)
        return {
            "rem_key": result.rem_key,
            "rev_id": result.revision.rev_id,
            "ar_results": result.ar_results,
        }

    @app.get("/rems")
    async def list_rems():
        with app.state.lock:
            return {"rems": [curator.rem_info(key) for key in curator.keys()]}

    @app.get("/rems/{key}")
    async def rem_info(key: str):
        with app.state.lock:
            return curator.rem_info(key)

    @app.post("/rems/{key}/sessions", status_code=201)
    async def open_session(key: str, request: Request):
        data = await _json_body(request) if await request.body() else {}
        actor = data.get("actor", DEFAULT_ACTOR)
        wait = bool(data.get("wait", False))
        with app.state.lock:
            session = curator.open_session(key, actor, resolve=False)
            app.state.sessions[session.session_id] = session
        if wait:
            with app.state.lock:
                curator.resolve_session(session)
        else:
            def _resolve():
                try:
                    with app.state.lock:
                        curator.resolve_session(session)
                except Exception:
                    log.exception("background resolve of %s failed", session.session_id)

            threading.Thread(target=_resolve, daemon=True).start()
        with app.state.lock:
            return _session_view(session)

    @app.get("/sessions/{session_id}")
    async def session_view(session_id: str):
        session = _session(session_id)
        with app.state.lock:
            return _session_view(session)

    @app.get("/sessions/{session_id}/attention/{entry_id}")
    async def attention(session_id: str, entry_id: str):
        session = _session(session_id)
        with app.state.lock:
            return _aid_view(curator.attention_aid(session, entry_id))

    @app.post("/sessions/{session_id}/decisions")
    async def decide(session_id: str, request: Request):
        data = await _json_body(request)
        for field in ("entry_id", "kind"):
            if field not in data:
                raise BadRequest(f'body needs "{field}"')
        try:
            kind = DecisionKind(data["kind"])
        except ValueError:
            raise BadRequest(f'unknown decision kind {data["kind"]!r}')
        session = _session(session_id)
        with app.state.lock:
            curator.apply_decision(
                session,
                str(data["entry_id"]),
                kind,
                data.get("actor", DEFAULT_ACTOR),
                new_uri=data.get("new_uri"),
            )
            return _session_view(session)

    @app.post("/sessions/{session_id}/finalize")
    async def finalize(session_id: str, request: Request):
        data = await _json_body(request) if await request.body() else {}
        session = _session(session_id)
        with app.state.lock:
            revision = curator.finalize(session, data.get("actor"))
            return {
                "rev_id": revision.rev_id,
                "committed": revision.rev_id != session.base_rev,
                "session": _session_view(session),
            }

    @app.get("/rems/{key}/history")
    async def history(key: str):
        with app.state.lock:
            return {
                "rem_key": key,
                "revisions": [r.summary() for r in curator.store.history(key)],
            }

    @app.get("/rems/{key}/revisions/{rev}")
    async def revision(key: str, rev: str):
        if rev != "head":
            try:
                int(rev)
            except ValueError:
                raise BadRequest("rev must be a revision number or \"head\"")
        with app.state.lock:
            return curator.store.get(key, rev).to_dict()

    @app.post("/rems/{key}/rollback")
    async def rollback(key: str, request: Request):
        data = await _json_body(request)
        if "target" not in data:
            raise BadRequest('body needs "target"')
        try:
            target = int(data["target"])
        except (TypeError, ValueError):
            raise BadRequest("target must be a revision number")
        with app.state.lock:
            revision = curator.rollback(key, target, data.get("actor", DEFAULT_ACTOR))
            return revision.summary()

    @app.get("/rems/{key}/timeline")
    async def timeline(key: str):
        with app.state.lock:
            return curator.export_timeline(key)

    return app


def serve(config: ServiceConfig):
    """Build the runtime and block serving HTTP until interrupted."""
    import uvicorn

    runtime = build_runtime(config)
    app = create_app(runtime)
    log.info("listening on %s:%s, storage %s", config.host, config.port, config.storage)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
