"""Web Infrastructure members: archives, caches, and search engines.

Members differ in what they keep.  Archives hold every pushed version but
may expose captures only after a visibility lag; caches hold exactly the
latest version; search engines answer term queries over what they crawled.
The registry fans a lookup out across whichever members are reachable, so
copies survive any single member going dark.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from pathlib import Path

from remcurator.clock import format_rfc3339
from remcurator.fingerprint import extract_text

log = logging.getLogger(__name__)


class MemberKind(str, Enum):
    ARCHIVE = "archive"
    CACHE = "cache"
    SEARCH = "search"


class Capability(str, Enum):
    PUSH = "push"
    LOOKUP = "lookup"
    HOLDINGS = "holdings"
    SEARCH = "search"


_REQUIRED = {
    MemberKind.ARCHIVE: {Capability.PUSH, Capability.LOOKUP, Capability.HOLDINGS},
    MemberKind.CACHE: {Capability.LOOKUP},
    MemberKind.SEARCH: {Capability.SEARCH},
}


class MemberUnavailable(Exception):
    def __init__(self, member_id: str):
        super().__init__(f"member {member_id} is unavailable")
        self.member_id = member_id


class CapabilityMissing(Exception):
    def __init__(self, member_id: str, capability: Capability):
        super().__init__(f"member {member_id} does not offer {capability.value}")
        self.member_id = member_id
        self.capability = capability


@dataclass(frozen=True)
class WIMemberDescriptor:
    member_id: str
    kind: MemberKind
    capabilities: frozenset
    lag: timedelta = timedelta(0)
    endpoint: str = ""

    def __post_init__(self) -> None:
        if not self.member_id:
            raise ValueError("member_id must be non-empty")
        missing = _REQUIRED[self.kind] - self.capabilities
        if missing:
            names = ", ".join(sorted(c.value for c in missing))
            raise ValueError(f"{self.kind.value} member {self.member_id} lacks {names}")
        if self.lag < timedelta(0):
            raise ValueError("lag must be non-negative")
        if self.kind is not MemberKind.ARCHIVE and self.lag > timedelta(0):
            raise ValueError("only archives have a visibility lag")


@dataclass(frozen=True)
class WIRecord:
    member_id: str
    original_uri: str
    archived_uri: str
    captured_at: datetime
    content: bytes
    media_type: str


def make_archived_uri(member_id: str, original_uri: str, captured_at: datetime) -> str:
    return f"{member_id}/{format_rfc3339(captured_at)}/{original_uri}"


class SimulatedMember:
    """In-memory WI member honoring its descriptor's kind and capabilities."""

    def __init__(self, descriptor: WIMemberDescriptor, clock):
        self.descriptor = descriptor
        self.clock = clock
        self.available = True
        self._lock = threading.Lock()
        self._records: dict[str, list[WIRecord]] = {}

    @property
    def member_id(self) -> str:
        return self.descriptor.member_id

    def set_available(self, available: bool) -> None:
        self.available = available

    def _require(self, capability: Capability) -> None:
        if not self.available:
            raise MemberUnavailable(self.member_id)
        if capability not in self.descriptor.capabilities:
            raise CapabilityMissing(self.member_id, capability)

    def _store(self, original_uri: str, content: bytes, media_type: str) -> WIRecord:
        captured_at = self.clock.now()
        record = WIRecord(
            member_id=self.member_id,
            original_uri=original_uri,
            archived_uri=make_archived_uri(self.member_id, original_uri, captured_at),
            captured_at=captured_at,
            content=content,
            media_type=media_type,
        )
        with self._lock:
            if self.descriptor.kind is MemberKind.ARCHIVE:
                self._records.setdefault(original_uri, []).append(record)
            else:
                # caches and crawler indexes keep one version and discard the rest
                self._records[original_uri] = [record]
        return record

    def push(self, original_uri: str, content: bytes, media_type: str) -> WIRecord:
        self._require(Capability.PUSH)
        return self._store(original_uri, content, media_type)

    def crawl(self, original_uri: str, content: bytes, media_type: str) -> WIRecord:
        """Seed a record the way ambient crawling would; not capability gated."""
        if not self.available:
            raise MemberUnavailable(self.member_id)
        return self._store(original_uri, content, media_type)

    def _visible(self, original_uri: str) -> list[WIRecord]:
        now = self.clock.now()
        lag = self.descriptor.lag
        with self._lock:
            records = list(self._records.get(original_uri, ()))
        return [r for r in records if r.captured_at + lag <= now]

    def lookup(self, original_uri: str) -> WIRecord | None:
        self._require(Capability.LOOKUP)
        visible = self._visible(original_uri)
        return visible[-1] if visible else None

    def holdings(self, original_uri: str) -> list[WIRecord]:
        self._require(Capability.HOLDINGS)
        return self._visible(original_uri)

    def search(self, query: str, limit: int = 10) -> list[str]:
        """URIs whose extracted text contains every query term, quoted phrases
        contiguously; ranked by summed term frequency, ties by URI."""
        self._require(Capability.SEARCH)
        phrases, terms = _parse_query(query)
        if not phrases and not terms:
            return []
        now = self.clock.now()
        scored: list[tuple[int, str]] = []
        with self._lock:
            latest = {uri: recs[-1] for uri, recs in self._records.items() if recs}
        for uri, record in latest.items():
            if record.captured_at + self.descriptor.lag > now:
                continue
            tokens = extract_text(record.content, record.media_type).split()
            score = 0
            ok = True
            for phrase in phrases:
                hits = _phrase_count(tokens, phrase)
                if hits == 0:
                    ok = False
                    break
                score += hits
            for term in terms:
                hits = tokens.count(term)
                if hits == 0:
                    ok = False
                    break
                score += hits
            if ok:
                scored.append((score, uri))
        scored.sort(key=lambda pair: (-pair[0], pair[1]))
        return [uri for _, uri in scored[:limit]]

    def snapshot_to(self, directory: str | Path) -> Path:
        """Dump holdings as JSON for debugging; content stored as UTF-8 text."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        out = directory / f"{self.member_id}.json"
        with self._lock:
            dump = {
                uri: [
                    {
                        "archived_uri": r.archived_uri,
                        "captured_at": format_rfc3339(r.captured_at),
                        "media_type": r.media_type,
                        "content": r.content.decode("utf-8", errors="replace"),
                    }
                    for r in records
                ]
                for uri, records in self._records.items()
            }
        out.write_text(json.dumps(dump, indent=2, sort_keys=True), "utf-8")
        return out


def _tokens(content: bytes) -> list[str]:
    text = content.decode("utf-8", errors="replace").lower()
    return re.findall(r"[^\W_]+", text, re.UNICODE)


def _parse_query(query: str) -> tuple[list[list[str]], list[str]]:
    phrases: list[list[str]] = []
    rest: list[str] = []
    parts = query.split('"')
    for index, part in enumerate(parts):
        words = _tokens(part.encode("utf-8"))
        if index % 2 == 1 and words:
            phrases.append(words)
        else:
            rest.extend(words)
    return phrases, rest


def _phrase_count(tokens: list[str], phrase: list[str]) -> int:
    if len(phrase) > len(tokens):
        return 0
    span = len(phrase)
    return sum(1 for i in range(len(tokens) - span + 1) if tokens[i : i + span] == phrase)


@dataclass(frozen=True)
class RelocationAid:
    """Everything shown to a curator hunting for a moved resource."""

    entry_id: str
    ar_uri: str
    wi_copies: tuple
    queries: tuple
    signature: tuple
    text_snapshot: str
    thumbnail_ref: str | None
    title: str
    last_known_at: datetime | None


def build_relocation_queries(title: str, authors, signature) -> list[str]:
    """Queries to paste into a search member or an outside engine, strongest
    first: the quoted title, title plus authors, then the lexical signature."""
    queries: list[str] = []
    title = " ".join(title.split())
    if title:
        queries.append(f'"{title}"')
        if authors:
            queries.append(" ".join([title, *authors]))
    if signature:
        queries.append(" ".join(signature))
    seen: set[str] = set()
    unique = []
    for q in queries:
        if q and q not in seen:
            seen.add(q)
            unique.append(q)
    return unique


class WIRegistry:
    """All configured members, with fan-out helpers that shrug off outages."""

    def __init__(self, clock):
        self.clock = clock
        self._members: dict[str, SimulatedMember] = {}

    def add(self, member: SimulatedMember) -> SimulatedMember:
        if member.member_id in self._members:
            raise ValueError(f"duplicate member id {member.member_id}")
        self._members[member.member_id] = member
        return member

    def member(self, member_id: str) -> SimulatedMember:
        return self._members[member_id]

    def members(self, kind: MemberKind | None = None) -> list[SimulatedMember]:
        members = self._members.values()
        if kind is not None:
            members = (m for m in members if m.descriptor.kind is kind)
        return sorted(members, key=lambda m: m.member_id)

    def push_to_archives(self, original_uri: str, content: bytes, media_type: str) -> list[WIRecord]:
        records = []
        for member in self.members(MemberKind.ARCHIVE):
            try:
                records.append(member.push(original_uri, content, media_type))
            except MemberUnavailable:
                log.warning("archive %s unavailable during push of %s", member.member_id, original_uri)
        return records

    def find_copies(self, original_uri: str) -> list[WIRecord]:
        """Every visible copy across members, newest first then by member id.

        Unavailable members are skipped with a warning so one outage never
        empties the result.
        """
        copies: list[WIRecord] = []
        for member in self.members():
            caps = member.descriptor.capabilities
            try:
                if Capability.HOLDINGS in caps:
                    copies.extend(member.holdings(original_uri))
                elif Capability.LOOKUP in caps:
                    record = member.lookup(original_uri)
                    if record is not None:
                        copies.append(record)
            except MemberUnavailable:
                log.warning("member %s unavailable during copy lookup of %s", member.member_id, original_uri)
        copies.sort(key=lambda r: (-r.captured_at.timestamp(), r.member_id))
        return copies

    def search(self, query: str, limit: int = 10) -> dict[str, list[str]]:
        results: dict[str, list[str]] = {}
        for member in self.members(MemberKind.SEARCH):
            try:
                results[member.member_id] = member.search(query, limit)
            except MemberUnavailable:
                log.warning("search member %s unavailable", member.member_id)
        return results
