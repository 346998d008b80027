"""Assisted curation of registered Resource Maps.

The curator owns the loop the whole system exists for: register a Resource
Map and push it plus its aggregated resources into the Web Infrastructure,
then in later sessions re-check every resource, rank what drifted or died,
and let a human resolve each case with a small set of decisions.  Every
finalized session becomes one revision; detections and decisions land on a
per-resource timeline.

State on disk under one storage root:

    revisions/   append-only revision logs, one per Resource Map
    state/       per-map JSON: fingerprints, timeline events, identity
    sessions/    one JSON per curation session, resumable across processes
    df.json      document-frequency table shared by all maps
    meta.json    counters
    access.log   one line per curatorial action
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime
from enum import Enum
from hashlib import sha256
from pathlib import Path
from urllib.parse import urlsplit, urlunsplit

from remcurator.clock import WallClock, format_rfc3339, parse_rfc3339
from remcurator.fingerprint import (
    DEFAULT_MINOR_THRESHOLD,
    DEFAULT_WRONG_CONTENT_THRESHOLD,
    ChangeSeverity,
    DfTable,
    Fingerprint,
    WICopy,
    build_fingerprint,
    classify_change,
    extract_text,
    is_wrong_content,
    text_preview_renderer,
)
from remcurator.ore import (
    AREntry,
    ChangeKind,
    ChangeRecord,
    RemError,
    ResourceMapDoc,
    change_record_from_dict,
    change_record_to_dict,
    diff_rems,
    parse_rem,
    serialize_rem,
)
from remcurator.revisions import Revision, RevisionStore
from remcurator.webfetch import FetchKind, fetch_all
from remcurator.wi import RelocationAid, build_relocation_queries

log = logging.getLogger(__name__)

REM_MEDIA_TYPE = "application/atom+xml"
_EXTERNAL_KINDS = {ChangeKind.AR_ADDED, ChangeKind.AR_REMOVED, ChangeKind.REM_METADATA_EDITED}


class CuratorError(Exception):
    pass


class AlreadyRegistered(CuratorError):
    pass


class NotRegistered(CuratorError):
    pass


class RemUnavailable(CuratorError):
    pass


class ParseFailure(CuratorError):
    pass


class UnknownSession(CuratorError):
    pass


class SessionClosed(CuratorError):
    pass


class SessionPending(CuratorError):
    pass


class StaleSession(CuratorError):
    pass


class NotInAttention(CuratorError):
    pass


class InvalidDecision(CuratorError):
    pass


class DecisionFetchFailed(CuratorError):
    pass


class UnresolvedAttention(CuratorError):
    pass


def rem_key(rem_uri: str) -> str:
    """Stable short key for a Resource Map URI.

    Scheme and host are case-folded and the fragment dropped, so trivial
    spelling variants of one URI land on the same history.
    """
    parts = urlsplit(rem_uri.strip())
    normalized = urlunsplit(
        (parts.scheme.lower(), parts.netloc.lower(), parts.path, parts.query, "")
    )
    return sha256(normalized.encode("utf-8")).hexdigest()[:16]


class ARState(str, Enum):
    OK = "ok"
    PENDING = "pending"
    NEEDS_ATTENTION = "needs-attention"
    FLAGGED_GONE = "flagged-gone"


class AttentionReason(str, Enum):
    MISSING = "missing"
    WRONG_CONTENT_CANDIDATE = "wrong-content-candidate"
    CHANGED_MINOR = "changed-minor"
    CHANGED_SIGNIFICANT = "changed-significant"


@dataclass
class ARStatus:
    entry_id: str
    ar_uri: str
    state: ARState
    reason: AttentionReason | None = None
    similarity: float | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "ar_uri": self.ar_uri,
            "state": self.state.value,
            "reason": self.reason.value if self.reason else None,
            "similarity": self.similarity,
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ARStatus":
        return cls(
            entry_id=data["entry_id"],
            ar_uri=data["ar_uri"],
            state=ARState(data["state"]),
            reason=AttentionReason(data["reason"]) if data["reason"] else None,
            similarity=data["similarity"],
            detail=data["detail"],
        )


class EventKind(str, Enum):
    FIRST_ARCHIVED = "first-archived"
    MINOR_CHANGE = "minor-change"
    SIGNIFICANT_CHANGE = "significant-change"
    MOVED = "moved"
    MISSING = "missing"
    FLAGGED_GONE = "flagged-gone"
    REARCHIVED = "rearchived"


_EVENT_LABELS = {
    EventKind.FIRST_ARCHIVED: "First archived",
    EventKind.MINOR_CHANGE: "Minor change",
    EventKind.SIGNIFICANT_CHANGE: "Significant change",
    EventKind.MOVED: "Moved",
    EventKind.MISSING: "Missing",
    EventKind.FLAGGED_GONE: "Flagged gone",
    EventKind.REARCHIVED: "Re-archived",
}


@dataclass(frozen=True)
class TimelineEvent:
    entry_id: str
    ar_uri: str
    at: datetime
    kind: EventKind

    @property
    def label(self) -> str:
        return _EVENT_LABELS[self.kind]

    def to_dict(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "ar_uri": self.ar_uri,
            "at": format_rfc3339(self.at),
            "kind": self.kind.value,
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TimelineEvent":
        return cls(
            entry_id=data["entry_id"],
            ar_uri=data["ar_uri"],
            at=parse_rfc3339(data["at"]),
            kind=EventKind(data["kind"]),
        )


class DecisionKind(str, Enum):
    RELOCATE = "relocate"
    FLAG_GONE = "flag-gone"
    REARCHIVE = "rearchive"
    ACCEPT_MINOR = "accept-minor"


@dataclass(frozen=True)
class Decision:
    kind: DecisionKind
    entry_id: str
    actor: str
    decided_at: datetime
    new_uri: str | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "entry_id": self.entry_id,
            "actor": self.actor,
            "decided_at": format_rfc3339(self.decided_at),
            "new_uri": self.new_uri,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Decision":
        return cls(
            kind=DecisionKind(data["kind"]),
            entry_id=data["entry_id"],
            actor=data["actor"],
            decided_at=parse_rfc3339(data["decided_at"]),
            new_uri=data["new_uri"],
        )


@dataclass
class CurationSession:
    session_id: str
    rem_key: str
    actor: str
    opened_at: datetime
    base_rev: int
    working_doc: ResourceMapDoc
    rem_missing: bool = False
    resolved: bool = False
    closed: bool = False
    final_rev: int | None = None
    external_changes: list = field(default_factory=list)
    staged_changes: list = field(default_factory=list)
    staged_events: list = field(default_factory=list)
    staged_fingerprints: dict = field(default_factory=dict)
    statuses: list = field(default_factory=list)
    decisions: list = field(default_factory=list)

    def status(self, entry_id: str) -> ARStatus:
        for status in self.statuses:
            if status.entry_id == entry_id:
                return status
        raise KeyError(entry_id)

    def attention(self) -> list:
        """Statuses a human still has to look at, in document order."""
        return [s for s in self.statuses if s.state is ARState.NEEDS_ATTENTION]

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "rem_key": self.rem_key,
            "actor": self.actor,
            "opened_at": format_rfc3339(self.opened_at),
            "base_rev": self.base_rev,
            "working_doc": serialize_rem(self.working_doc).decode("utf-8"),
            "rem_missing": self.rem_missing,
            "resolved": self.resolved,
            "closed": self.closed,
            "final_rev": self.final_rev,
            "external_changes": [change_record_to_dict(c) for c in self.external_changes],
            "staged_changes": [change_record_to_dict(c) for c in self.staged_changes],
            "staged_events": [e.to_dict() for e in self.staged_events],
            "staged_fingerprints": {
                entry_id: fp.to_dict() for entry_id, fp in self.staged_fingerprints.items()
            },
            "statuses": [s.to_dict() for s in self.statuses],
            "decisions": [d.to_dict() for d in self.decisions],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CurationSession":
        return cls(
            session_id=data["session_id"],
            rem_key=data["rem_key"],
            actor=data["actor"],
            opened_at=parse_rfc3339(data["opened_at"]),
            base_rev=data["base_rev"],
            working_doc=parse_rem(data["working_doc"].encode("utf-8")),
            rem_missing=data["rem_missing"],
            resolved=data["resolved"],
            closed=data["closed"],
            final_rev=data["final_rev"],
            external_changes=[change_record_from_dict(c) for c in data["external_changes"]],
            staged_changes=[change_record_from_dict(c) for c in data["staged_changes"]],
            staged_events=[TimelineEvent.from_dict(e) for e in data["staged_events"]],
            staged_fingerprints={
                entry_id: Fingerprint.from_dict(fp)
                for entry_id, fp in data["staged_fingerprints"].items()
            },
            statuses=[ARStatus.from_dict(s) for s in data["statuses"]],
            decisions=[Decision.from_dict(d) for d in data["decisions"]],
        )


@dataclass(frozen=True)
class RegistrationResult:
    rem_key: str
    revision: Revision
    ar_results: dict  # entry_id -> FetchKind value


def _write_json(path: Path, data: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(data, indent=2, sort_keys=True), "utf-8")
    tmp.replace(path)


class Curator:
    """Registration, drift checking, decision handling, and timelines."""

    def __init__(
        self,
        storage_root: str | Path,
        registry,
        fetcher,
        clock=None,
        minor_threshold: float = DEFAULT_MINOR_THRESHOLD,
        wrong_threshold: float = DEFAULT_WRONG_CONTENT_THRESHOLD,
        deadline: float = 10.0,
        max_in_flight: int = 8,
        thumbnail_renderer=text_preview_renderer,
    ):
        self.root = Path(storage_root)
        self.registry = registry
        self.fetcher = fetcher
        self.clock = clock or WallClock()
        self.minor_threshold = minor_threshold
        self.wrong_threshold = wrong_threshold
        self.deadline = deadline
        self.max_in_flight = max_in_flight
        self.thumbnail_renderer = thumbnail_renderer
        self.store = RevisionStore(self.root / "revisions", self.clock)
        self._state_dir = self.root / "state"
        self._session_dir = self.root / "sessions"
        self._state_dir.mkdir(parents=True, exist_ok=True)
        self._session_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()

    # -- persistence helpers ------------------------------------------------

    def _state_path(self, key: str) -> Path:
        return self._state_dir / f"{key}.json"

    def _load_state(self, key: str) -> dict:
        path = self._state_path(key)
        if not path.exists():
            raise NotRegistered(f"no Resource Map registered under key {key}")
        return json.loads(path.read_text("utf-8"))

    def _save_state(self, key: str, state: dict) -> None:
        _write_json(self._state_path(key), state)

    def _load_df(self) -> DfTable:
        path = self.root / "df.json"
        if path.exists():
            return DfTable.from_dict(json.loads(path.read_text("utf-8")))
        return DfTable()

    def _save_df(self, df: DfTable) -> None:
        _write_json(self.root / "df.json", df.to_dict())

    def _next_session_id(self) -> str:
        meta_path = self.root / "meta.json"
        with self._lock:
            meta = json.loads(meta_path.read_text("utf-8")) if meta_path.exists() else {}
            meta["last_session_id"] = meta.get("last_session_id", 0) + 1
            _write_json(meta_path, meta)
            return f"s{meta['last_session_id']:04d}"

    def _log_access(self, actor: str, action: str, detail: str) -> None:
        line = "\t".join([format_rfc3339(self.clock.now()), actor, action, detail])
        with self._lock:
            with open(self.root / "access.log", "a", encoding="utf-8") as handle:
                handle.write(line + "\n")

    def save_session(self, session: CurationSession) -> None:
        _write_json(self._session_dir / f"{session.session_id}.json", session.to_dict())

    def load_session(self, session_id: str) -> CurationSession:
        path = self._session_dir / f"{session_id}.json"
        if not path.exists():
            raise UnknownSession(f"no session {session_id}")
        return CurationSession.from_dict(json.loads(path.read_text("utf-8")))

    # -- fingerprinting -----------------------------------------------------

    @staticmethod
    def _copies(records) -> tuple:
        return tuple(WICopy(r.member_id, r.archived_uri, r.captured_at) for r in records)

    def _archive_and_fingerprint(self, entry, outcome, df: DfTable, extra_copies=()):
        """Push a fetched capture into the archives and fingerprint it.

        The capture's text must already be counted in ``df``.
        """
        records = self.registry.push_to_archives(entry.ar_uri, outcome.content, outcome.media_type)
        text = extract_text(outcome.content, outcome.media_type)
        return build_fingerprint(
            entry.ar_uri,
            text,
            outcome.fetched_at,
            df,
            renderer=self.thumbnail_renderer,
            wi_copies=tuple(extra_copies) + self._copies(records),
        )

    # -- registration -------------------------------------------------------

    def register(self, source: "str | bytes", actor: str) -> RegistrationResult:
        """Bring a Resource Map under curation.

        ``source`` is either the Resource Map URI to fetch or its raw Atom
        bytes.  The map and every fetchable aggregated resource are pushed
        into the archives, fingerprints are taken, and revision 1 commits.
        """
        if isinstance(source, bytes):
            raw = source
        else:
            outcome = self.fetcher.fetch(source, self.deadline)
            if not outcome.is_ok:
                raise RemUnavailable(f"cannot fetch Resource Map {source}: {outcome.kind.value}")
            raw = outcome.content
        try:
            doc = parse_rem(raw)
        except RemError as exc:
            raise ParseFailure(str(exc)) from exc

        key = rem_key(doc.rem_uri)
        with self._lock:
            if self._state_path(key).exists():
                raise AlreadyRegistered(f"{doc.rem_uri} is already registered as {key}")

            now = self.clock.now()
            self.registry.push_to_archives(doc.rem_uri, raw, REM_MEDIA_TYPE)

            live_entries = [e for e in doc.entries if not e.flagged_gone]
            outcomes = fetch_all(
                self.fetcher,
                [e.ar_uri for e in live_entries],
                max_in_flight=self.max_in_flight,
                deadline=self.deadline,
            )
            df = self._load_df()
            fetched = [e for e in live_entries if outcomes[e.ar_uri].is_ok]
            # count all captures before scoring any, so signatures within one
            # batch see the same document frequencies
            for entry in fetched:
                out = outcomes[entry.ar_uri]
                df.add_document(extract_text(out.content, out.media_type))
            fingerprints = {}
            events = []
            ar_results = {}
            for entry in doc.entries:
                out = outcomes.get(entry.ar_uri)
                ar_results[entry.entry_id] = out.kind.value if out else "skipped"
                if out is not None and out.is_ok:
                    fingerprints[entry.entry_id] = self._archive_and_fingerprint(entry, out, df)
                    events.append(TimelineEvent(entry.entry_id, entry.ar_uri, now, EventKind.FIRST_ARCHIVED))

            changes = [
                ChangeRecord(kind=ChangeKind.AR_ADDED, entry_id=e.entry_id, new_value=e.ar_uri)
                for e in doc.entries
            ]
            revision = self.store.commit(key, doc, changes, actor, "registered")
            self._save_df(df)
            self._save_state(
                key,
                {
                    "rem_uri": doc.rem_uri,
                    "registered_at": format_rfc3339(now),
                    "fingerprints": {eid: fp.to_dict() for eid, fp in fingerprints.items()},
                    "events": [e.to_dict() for e in events],
                },
            )
        self._log_access(actor, "register", f"{key} {doc.rem_uri}")
        return RegistrationResult(key, revision, ar_results)

    # -- sessions -----------------------------------------------------------

    def open_session(self, key: str, actor: str, resolve: bool = True) -> CurationSession:
        """Start a curation session against the current head.

        Fetches the live Resource Map first: additions, removals, and feed
        metadata edits made by the author are adopted into the working copy
        and reported as external changes.  Curated values on entries both
        sides share are kept.  With ``resolve=False`` every live resource
        stays pending until ``resolve_session`` runs.
        """
        state = self._load_state(key)
        head = self.store.get(key)
        head_doc = parse_rem(head.snapshot.encode("utf-8"))

        rem_missing = False
        live_doc = head_doc
        outcome = self.fetcher.fetch(state["rem_uri"], self.deadline)
        if outcome.is_ok:
            try:
                live_doc = parse_rem(outcome.content)
            except RemError:
                rem_missing = True
        else:
            rem_missing = True

        external = [c for c in diff_rems(head_doc, live_doc) if c.kind in _EXTERNAL_KINDS]
        removed = {c.entry_id for c in external if c.kind is ChangeKind.AR_REMOVED}
        added = [c.entry_id for c in external if c.kind is ChangeKind.AR_ADDED]
        entries = [e for e in head_doc.entries if e.entry_id not in removed]
        entries.extend(live_doc.entry(entry_id) for entry_id in added)
        working = head_doc.with_entries(entries)
        if any(c.kind is ChangeKind.REM_METADATA_EDITED for c in external):
            working = replace(working, title=live_doc.title, authors=live_doc.authors)

        session = CurationSession(
            session_id=self._next_session_id(),
            rem_key=key,
            actor=actor,
            opened_at=self.clock.now(),
            base_rev=head.rev_id,
            working_doc=working,
            rem_missing=rem_missing,
            external_changes=external,
            statuses=[
                ARStatus(
                    e.entry_id,
                    e.ar_uri,
                    ARState.FLAGGED_GONE if e.flagged_gone else ARState.PENDING,
                )
                for e in working.entries
            ],
        )
        self.save_session(session)
        with self._lock:
            state = self._load_state(key)
            state["last_session"] = session.session_id
            self._save_state(key, state)
        self._log_access(actor, "open-session", f"{session.session_id} {key}")
        if resolve:
            self.resolve_session(session)
        return session

    def resolve_session(self, session: CurationSession) -> CurationSession:
        """Fetch every live resource and classify it against its fingerprint."""
        if session.closed:
            raise SessionClosed(f"session {session.session_id} is closed")
        state = self._load_state(session.rem_key)
        fingerprints = {
            eid: Fingerprint.from_dict(fp) for eid, fp in state["fingerprints"].items()
        }
        live = [e for e in session.working_doc.entries if not e.flagged_gone]
        outcomes = fetch_all(
            self.fetcher,
            [e.ar_uri for e in live],
            max_in_flight=self.max_in_flight,
            deadline=self.deadline,
        )
        now = self.clock.now()
        with self._lock:
            df = self._load_df()
            fresh = [
                e
                for e in live
                if e.entry_id not in fingerprints and outcomes[e.ar_uri].is_ok
            ]
            for entry in fresh:
                out = outcomes[entry.ar_uri]
                df.add_document(extract_text(out.content, out.media_type))
            for entry in live:
                status = session.status(entry.entry_id)
                out = outcomes[entry.ar_uri]
                if not out.is_ok:
                    status.state = ARState.NEEDS_ATTENTION
                    status.reason = AttentionReason.MISSING
                    status.detail = out.detail or out.kind.value
                    session.staged_events.append(
                        TimelineEvent(entry.entry_id, entry.ar_uri, now, EventKind.MISSING)
                    )
                    continue
                old = fingerprints.get(entry.entry_id)
                if old is None:
                    session.staged_fingerprints[entry.entry_id] = self._archive_and_fingerprint(
                        entry, out, df
                    )
                    session.staged_events.append(
                        TimelineEvent(entry.entry_id, entry.ar_uri, now, EventKind.FIRST_ARCHIVED)
                    )
                    status.state = ARState.OK
                    continue
                text = extract_text(out.content, out.media_type)
                change = classify_change(old, text, self.minor_threshold)
                status.similarity = change.similarity
                if change.kind is ChangeSeverity.UNCHANGED:
                    status.state = ARState.OK
                elif is_wrong_content(old, text, self.wrong_threshold):
                    status.state = ARState.NEEDS_ATTENTION
                    status.reason = AttentionReason.WRONG_CONTENT_CANDIDATE
                elif change.kind is ChangeSeverity.MINOR:
                    status.state = ARState.NEEDS_ATTENTION
                    status.reason = AttentionReason.CHANGED_MINOR
                else:
                    status.state = ARState.NEEDS_ATTENTION
                    status.reason = AttentionReason.CHANGED_SIGNIFICANT
                    session.staged_events.append(
                        TimelineEvent(entry.entry_id, entry.ar_uri, now, EventKind.SIGNIFICANT_CHANGE)
                    )
            self._save_df(df)
        session.resolved = True
        self.save_session(session)
        return session

    # -- attention and decisions --------------------------------------------

    def attention_aid(self, session: CurationSession, entry_id: str) -> RelocationAid:
        """Everything the dashboard shows for one flagged resource: archived
        copies across the infrastructure, ready-made relocation queries, and
        the stored fingerprint."""
        try:
            status = session.status(entry_id)
        except KeyError:
            raise NotInAttention(f"no entry {entry_id} in session {session.session_id}")
        if status.state is not ARState.NEEDS_ATTENTION:
            raise NotInAttention(f"entry {entry_id} is {status.state.value}, not awaiting review")
        entry = session.working_doc.entry(entry_id)
        state = self._load_state(session.rem_key)
        fp_data = state["fingerprints"].get(entry_id)
        fp = Fingerprint.from_dict(fp_data) if fp_data else None
        signature = fp.lexical_signature if fp else ()
        copies = self.registry.find_copies(entry.ar_uri)
        if fp and fp.ar_uri != entry.ar_uri:
            copies = copies + self.registry.find_copies(fp.ar_uri)
        return RelocationAid(
            entry_id=entry_id,
            ar_uri=entry.ar_uri,
            wi_copies=self._copies(copies),
            queries=tuple(
                build_relocation_queries(entry.title, session.working_doc.authors, signature)
            ),
            signature=tuple(signature),
            text_snapshot=fp.text_snapshot if fp else "",
            thumbnail_ref=fp.thumbnail_ref if fp else None,
            title=entry.title,
            last_known_at=fp.captured_at if fp else None,
        )

    def _drop_staged(self, session: CurationSession, entry_id: str, kinds) -> None:
        session.staged_events = [
            e for e in session.staged_events if not (e.entry_id == entry_id and e.kind in kinds)
        ]

    def apply_decision(
        self,
        session: CurationSession,
        entry_id: str,
        kind: DecisionKind,
        actor: str,
        new_uri: str | None = None,
    ) -> CurationSession:
        """Resolve one flagged resource.

        relocate      point the entry at ``new_uri`` and archive what is there
        flag-gone     keep the entry, mark it gone, rely on archived copies
        rearchive     accept the changed content and archive the new version
        accept-minor  adopt the drift as the new baseline without archiving
        """
        if session.closed:
            raise SessionClosed(f"session {session.session_id} is closed")
        try:
            status = session.status(entry_id)
        except KeyError:
            raise NotInAttention(f"no entry {entry_id} in session {session.session_id}")
        if status.state is not ARState.NEEDS_ATTENTION:
            raise NotInAttention(f"entry {entry_id} is {status.state.value}, not awaiting review")
        entry = session.working_doc.entry(entry_id)
        state = self._load_state(session.rem_key)
        fp_data = state["fingerprints"].get(entry_id)
        stored_fp = session.staged_fingerprints.get(entry_id) or (
            Fingerprint.from_dict(fp_data) if fp_data else None
        )
        now = self.clock.now()

        if kind is DecisionKind.RELOCATE:
            if not new_uri:
                raise InvalidDecision("relocate needs the new URI")
            outcome = self.fetcher.fetch(new_uri, self.deadline)
            if not outcome.is_ok:
                raise DecisionFetchFailed(
                    f"relocation target {new_uri} is unfetchable: {outcome.detail or outcome.kind.value}"
                )
            moved = replace(entry, ar_uri=new_uri)
            session.working_doc = _swap_entry(session.working_doc, moved)
            with self._lock:
                df = self._load_df()
                df.add_document(extract_text(outcome.content, outcome.media_type))
                old_copies = stored_fp.wi_copies if stored_fp else ()
                session.staged_fingerprints[entry_id] = self._archive_and_fingerprint(
                    moved, outcome, df, extra_copies=old_copies
                )
                self._save_df(df)
            session.staged_changes.append(
                ChangeRecord(
                    kind=ChangeKind.AR_MOVED,
                    entry_id=entry_id,
                    old_value=entry.ar_uri,
                    new_value=new_uri,
                )
            )
            self._drop_staged(session, entry_id, {EventKind.MISSING})
            session.staged_events.append(TimelineEvent(entry_id, new_uri, now, EventKind.MOVED))
            status.ar_uri = new_uri
            status.state = ARState.OK
            status.reason = None
            status.detail = ""

        elif kind is DecisionKind.FLAG_GONE:
            session.working_doc = _swap_entry(
                session.working_doc, replace(entry, flagged_gone=True)
            )
            session.staged_changes.append(
                ChangeRecord(
                    kind=ChangeKind.AR_FLAGGED_GONE, entry_id=entry_id, old_value=entry.ar_uri
                )
            )
            self._drop_staged(session, entry_id, {EventKind.MISSING})
            session.staged_events.append(
                TimelineEvent(entry_id, entry.ar_uri, now, EventKind.FLAGGED_GONE)
            )
            status.state = ARState.FLAGGED_GONE
            status.reason = None
            status.detail = ""

        elif kind is DecisionKind.REARCHIVE:
            outcome = self.fetcher.fetch(entry.ar_uri, self.deadline)
            if not outcome.is_ok:
                raise DecisionFetchFailed(
                    f"{entry.ar_uri} is unfetchable: {outcome.detail or outcome.kind.value}"
                )
            with self._lock:
                df = self._load_df()
                df.add_document(extract_text(outcome.content, outcome.media_type))
                old_copies = stored_fp.wi_copies if stored_fp else ()
                session.staged_fingerprints[entry_id] = self._archive_and_fingerprint(
                    entry, outcome, df, extra_copies=old_copies
                )
                self._save_df(df)
            session.staged_changes.append(
                ChangeRecord(kind=ChangeKind.AR_REARCHIVED, entry_id=entry_id)
            )
            session.staged_events.append(
                TimelineEvent(entry_id, entry.ar_uri, now, EventKind.REARCHIVED)
            )
            status.state = ARState.OK
            status.reason = None
            status.detail = ""

        elif kind is DecisionKind.ACCEPT_MINOR:
            if status.reason is not AttentionReason.CHANGED_MINOR:
                raise InvalidDecision("accept-minor only applies to minor drift")
            # the drift is noted on the timeline but the archived fingerprint
            # stays as it is and nothing is re-pushed
            session.staged_events.append(
                TimelineEvent(entry_id, entry.ar_uri, now, EventKind.MINOR_CHANGE)
            )
            status.state = ARState.OK
            status.reason = None
            status.detail = ""

        else:
            raise InvalidDecision(f"unknown decision kind {kind!r}")

        session.decisions.append(Decision(kind, entry_id, actor, now, new_uri))
        self.save_session(session)
        self._log_access(actor, "decision", f"{session.session_id} {entry_id} {kind.value}")
        return session

    # -- finalize -----------------------------------------------------------

    def finalize(self, session: CurationSession, actor: str | None = None) -> Revision:
        """Close the session, committing one revision if anything changed.

        External author edits and curatorial decisions land in the same
        revision.  Sessions with open attention items refuse to close.
        """
        actor = actor or session.actor
        if session.closed:
            raise SessionClosed(f"session {session.session_id} is closed")
        if not session.resolved or any(s.state is ARState.PENDING for s in session.statuses):
            raise SessionPending(f"session {session.session_id} still has pending checks")
        open_items = [s.entry_id for s in session.attention()]
        if open_items:
            raise UnresolvedAttention(
                f"undecided attention items: {', '.join(open_items)}"
            )
        head = self.store.get(session.rem_key)
        if head.rev_id != session.base_rev:
            raise StaleSession(
                f"head moved from r{session.base_rev} to r{head.rev_id} while the session was open"
            )

        changes = list(session.external_changes) + list(session.staged_changes)
        with self._lock:
            state = self._load_state(session.rem_key)
            if changes:
                doc = replace(session.working_doc, updated=self.clock.now())
                revision = self.store.commit(
                    session.rem_key, doc, changes, actor, f"curation session {session.session_id}"
                )
                self.registry.push_to_archives(
                    state["rem_uri"], revision.snapshot.encode("utf-8"), REM_MEDIA_TYPE
                )
            else:
                revision = head
            for entry_id, fp in session.staged_fingerprints.items():
                state["fingerprints"][entry_id] = fp.to_dict()
            state["events"].extend(e.to_dict() for e in session.staged_events)
            self._save_state(session.rem_key, state)
        session.closed = True
        session.final_rev = revision.rev_id
        self.save_session(session)
        self._log_access(actor, "finalize", f"{session.session_id} -> r{revision.rev_id}")
        return revision

    # -- history and timeline -----------------------------------------------

    def rollback(self, key: str, target: int, actor: str) -> Revision:
        self._load_state(key)  # surfaces NotRegistered before touching the log
        revision = self.store.rollback(key, target, actor)
        self._log_access(actor, "rollback", f"{key} -> r{target}")
        return revision

    def timeline(self, key: str) -> list:
        """All recorded events, oldest first; same-instant events keep the
        order they were recorded in."""
        state = self._load_state(key)
        return [TimelineEvent.from_dict(e) for e in state["events"]]

    def export_timeline(self, key: str) -> dict:
        """Timeline grouped into per-resource lanes for display, lanes ordered
        by each resource's first event."""
        events = self.timeline(key)
        lanes: dict[str, list] = {}
        for event in events:
            lanes.setdefault(event.entry_id, []).append(event)
        ordered = sorted(lanes.items(), key=lambda item: (item[1][0].at, item[0]))
        return {
            "rem_key": key,
            "entries": [
                {
                    "entry_id": entry_id,
                    "ar_uri": lane[-1].ar_uri,
                    "events": [e.to_dict() for e in lane],
                }
                for entry_id, lane in ordered
            ],
        }

    def rem_info(self, key: str) -> dict:
        """Head snapshot plus, when one exists, the last session's statuses."""
        state = self._load_state(key)
        head = self.store.get(key)
        doc = parse_rem(head.snapshot.encode("utf-8"))
        last_session = state.get("last_session")
        last_statuses = None
        if last_session:
            try:
                last_statuses = [s.to_dict() for s in self.load_session(last_session).statuses]
            except UnknownSession:
                last_session = None
        return {
            "rem_key": key,
            "rem_uri": state["rem_uri"],
            "registered_at": state["registered_at"],
            "title": doc.title,
            "authors": list(doc.authors),
            "head_rev": head.rev_id,
            "head_snapshot": head.snapshot,
            "last_session": last_session,
            "last_statuses": last_statuses,
            "entries": [
                {
                    "entry_id": e.entry_id,
                    "ar_uri": e.ar_uri,
                    "title": e.title,
                    "flagged_gone": e.flagged_gone,
                }
                for e in doc.entries
            ],
        }

    def keys(self) -> list:
        return sorted(p.stem for p in self._state_dir.glob("*.json"))


def _swap_entry(doc: ResourceMapDoc, entry: AREntry) -> ResourceMapDoc:
    return doc.with_entries(
        [entry if e.entry_id == entry.entry_id else e for e in doc.entries]
    )
