"""Append-only revision history with wiki-style rollback.

Each key owns one log file of records:

    [4-byte big-endian payload length][UTF-8 JSON payload][32-byte SHA-256]

The digest covers the payload bytes, so a torn tail from a crashed writer
is detected on load and truncated before the next append.  Every revision
carries a full serialized snapshot; rollback appends a new revision whose
snapshot is a byte-for-byte copy of the target's, never rewriting history.
See docs/revision-log-format.md.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import struct
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from remcurator.clock import WallClock, format_rfc3339, parse_rfc3339
from remcurator.ore import (
    ChangeKind,
    ChangeRecord,
    RemError,
    ResourceMapDoc,
    change_record_from_dict,
    change_record_to_dict,
    parse_rem,
    serialize_rem,
)

_LEN = struct.Struct(">I")
_DIGEST_SIZE = 32
_SAFE_KEY = re.compile(r"^[A-Za-z0-9._-]{1,64}$")


class RevisionError(Exception):
    pass


class UnknownKey(RevisionError):
    def __init__(self, key: str):
        super().__init__(f"no revisions for key {key!r}")
        self.key = key


class UnknownRevision(RevisionError):
    def __init__(self, key: str, rev_id: int):
        super().__init__(f"key {key!r} has no revision {rev_id}")
        self.key = key
        self.rev_id = rev_id


class TargetIsHead(RevisionError):
    def __init__(self, key: str, rev_id: int):
        super().__init__(f"revision {rev_id} is already the head of {key!r}")
        self.key = key
        self.rev_id = rev_id


class ValidationFailure(RevisionError):
    pass


class StorageFailure(RevisionError):
    pass


@dataclass(frozen=True)
class Revision:
    rev_id: int
    parent: int | None
    committed_at: datetime
    actor: str
    note: str
    changes: tuple
    snapshot: str  # full serialized document, stored verbatim

    def doc(self) -> ResourceMapDoc:
        return parse_rem(self.snapshot.encode("utf-8"))

    def summary(self) -> dict:
        """History-row projection; the full snapshot stays out of listings."""
        return {
            "rev_id": self.rev_id,
            "parent": self.parent,
            "committed_at": format_rfc3339(self.committed_at),
            "actor": self.actor,
            "note": self.note,
            "change_kinds": [c.kind.value for c in self.changes],
        }

    def to_dict(self) -> dict:
        return {
            "rev_id": self.rev_id,
            "parent": self.parent,
            "committed_at": format_rfc3339(self.committed_at),
            "actor": self.actor,
            "note": self.note,
            "changes": [change_record_to_dict(c) for c in self.changes],
            "snapshot": self.snapshot,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Revision":
        return cls(
            rev_id=data["rev_id"],
            parent=data["parent"],
            committed_at=parse_rfc3339(data["committed_at"]),
            actor=data["actor"],
            note=data["note"],
            changes=tuple(change_record_from_dict(c) for c in data["changes"]),
            snapshot=data["snapshot"],
        )


def _encode(payload: dict) -> bytes:
    body = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return _LEN.pack(len(body)) + body + hashlib.sha256(body).digest()


class RevisionStore:
    def __init__(self, root: str | Path, clock=None):
        self.root = Path(root)
        self.clock = clock or WallClock()
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageFailure(f"cannot create revision root {self.root}: {exc}") from exc
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, key: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(key, threading.Lock())

    def _path(self, key: str) -> Path:
        if not key:
            raise ValidationFailure("key must be non-empty")
        name = key if _SAFE_KEY.match(key) else hashlib.sha256(key.encode("utf-8")).hexdigest()
        return self.root / f"{name}.log"

    def _load(self, path: Path) -> tuple[list[Revision], int]:
        """Read every intact record; return revisions plus the byte offset of
        the first torn record, which the next append truncates away."""
        revisions: list[Revision] = []
        if not path.exists():
            return revisions, 0
        try:
            blob = path.read_bytes()
        except OSError as exc:
            raise StorageFailure(f"cannot read {path}: {exc}") from exc
        offset = 0
        while True:
            header = blob[offset : offset + _LEN.size]
            if len(header) < _LEN.size:
                break
            (length,) = _LEN.unpack(header)
            start = offset + _LEN.size
            end = start + length + _DIGEST_SIZE
            if end > len(blob):
                break
            body = blob[start : start + length]
            digest = blob[start + length : end]
            if hashlib.sha256(body).digest() != digest:
                break
            try:
                revisions.append(Revision.from_dict(json.loads(body.decode("utf-8"))))
            except (ValueError, KeyError) as exc:
                raise StorageFailure(f"corrupt record in {path} at offset {offset}: {exc}") from exc
            offset = end
        return revisions, offset

    def _append(self, path: Path, revision: Revision, key: str, valid_to: int) -> None:
        record = _encode({"rem_key": key, **revision.to_dict()})
        try:
            with open(path, "ab") as handle:
                if handle.tell() != valid_to:
                    handle.truncate(valid_to)
                    handle.seek(valid_to)
                handle.write(record)
                handle.flush()
                os.fsync(handle.fileno())
        except OSError as exc:
            raise StorageFailure(f"cannot append to {path}: {exc}") from exc

    def commit(self, key: str, doc: ResourceMapDoc, changes, actor: str, note: str) -> Revision:
        if not actor:
            raise ValidationFailure("actor must be non-empty")
        if not isinstance(doc, ResourceMapDoc):
            raise ValidationFailure("commit needs a parsed Resource Map document")
        try:
            snapshot = serialize_rem(doc).decode("utf-8")
        except RemError as exc:
            raise ValidationFailure(f"document does not validate: {exc}") from exc
        changes = tuple(changes)
        for change in changes:
            if not isinstance(change, ChangeRecord):
                raise ValidationFailure(f"not a change record: {change!r}")
        path = self._path(key)
        with self._lock(key):
            revisions, valid_to = self._load(path)
            parent = revisions[-1].rev_id if revisions else None
            revision = Revision(
                rev_id=(parent or 0) + 1,
                parent=parent,
                committed_at=self.clock.now(),
                actor=actor,
                note=note,
                changes=changes,
                snapshot=snapshot,
            )
            self._append(path, revision, key, valid_to)
        return revision

    def exists(self, key: str) -> bool:
        revisions, _ = self._load(self._path(key))
        return bool(revisions)

    def history(self, key: str) -> list[Revision]:
        """All revisions, oldest first."""
        revisions, _ = self._load(self._path(key))
        if not revisions:
            raise UnknownKey(key)
        return revisions

    def head_id(self, key: str) -> int:
        return self.history(key)[-1].rev_id

    def get(self, key: str, rev: "int | str" = "head") -> Revision:
        revisions = self.history(key)
        if rev == "head":
            return revisions[-1]
        rev_id = int(rev)
        if not 1 <= rev_id <= len(revisions):
            raise UnknownRevision(key, rev_id)
        revision = revisions[rev_id - 1]
        assert revision.rev_id == rev_id
        return revision

    def rollback(self, key: str, target: int, actor: str) -> Revision:
        """Make revision ``target`` current again by appending a copy of it."""
        if not actor:
            raise ValidationFailure("actor must be non-empty")
        path = self._path(key)
        with self._lock(key):
            revisions, valid_to = self._load(path)
            if not revisions:
                raise UnknownKey(key)
            head = revisions[-1]
            if target == head.rev_id:
                raise TargetIsHead(key, target)
            if not 1 <= target < head.rev_id:
                raise UnknownRevision(key, target)
            source = revisions[target - 1]
            revision = Revision(
                rev_id=head.rev_id + 1,
                parent=head.rev_id,
                committed_at=self.clock.now(),
                actor=actor,
                note=f"rollback to revision {target}",
                changes=(ChangeRecord(kind=ChangeKind.ROLLBACK, new_value=str(target)),),
                snapshot=source.snapshot,
            )
            self._append(path, revision, key, valid_to)
        return revision

    def keys(self) -> list[str]:
        """Log file stems; hashed for keys that were not filename safe."""
        return sorted(p.stem for p in self.root.glob("*.log"))

    def export_changelog(self, key: str) -> str:
        lines = []
        for revision in self.history(key):
            kinds = ",".join(c.kind.value for c in revision.changes)
            lines.append(
                "\t".join(
                    [
                        f"r{revision.rev_id}",
                        format_rfc3339(revision.committed_at),
                        revision.actor,
                        kinds,
                        revision.note,
                    ]
                )
            )
        return "\n".join(lines) + "\n"
