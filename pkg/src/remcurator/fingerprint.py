"""Per-resource fingerprints: text extraction, lexical signatures, digests,
similarity scores, and change classification.

A fingerprint is the small bundle of identity aids kept for every archived
resource so that it can be re-found after it moves and so that content
drift can be graded before a human decides what to do about it.
"""

from __future__ import annotations

import hashlib
import math
import re
from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from html.parser import HTMLParser
from importlib import resources
from typing import Callable

from remcurator.clock import format_rfc3339, parse_rfc3339

SIGNATURE_SIZE = 5
SHINGLE_SIZE = 4
SNAPSHOT_CHARS = 10_000
PREVIEW_CHARS = 500

DEFAULT_MINOR_THRESHOLD = 0.80
DEFAULT_WRONG_CONTENT_THRESHOLD = 0.20

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


class EmptyText(Exception):
    """Raised when a signature is requested for text with no tokens.

    Callers fall back to a metadata-only fingerprint.
    """


def _load_stopwords() -> frozenset[str]:
    data = resources.files("remcurator").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(line.strip() for line in data.splitlines() if line.strip())


STOPWORDS = _load_stopwords()


@dataclass(frozen=True)
class WICopy:
    """Pointer to one archived copy of a resource in an infrastructure member."""

    member_id: str
    archived_uri: str
    captured_at: datetime


@dataclass(frozen=True)
class Fingerprint:
    ar_uri: str
    lexical_signature: tuple[str, ...]
    content_digest: str
    text_snapshot: str
    thumbnail_ref: str | None
    captured_at: datetime
    wi_copies: tuple[WICopy, ...] = ()

    def to_dict(self) -> dict:
        return {
            "ar_uri": self.ar_uri,
            "lexical_signature": list(self.lexical_signature),
            "content_digest": self.content_digest,
            "text_snapshot": self.text_snapshot,
            "thumbnail_ref": self.thumbnail_ref,
            "captured_at": format_rfc3339(self.captured_at),
            "wi_copies": [
                [c.member_id, c.archived_uri, format_rfc3339(c.captured_at)]
                for c in self.wi_copies
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Fingerprint":
        return cls(
            ar_uri=data["ar_uri"],
            lexical_signature=tuple(data["lexical_signature"]),
            content_digest=data["content_digest"],
            text_snapshot=data["text_snapshot"],
            thumbnail_ref=data.get("thumbnail_ref"),
            captured_at=parse_rfc3339(data["captured_at"]),
            wi_copies=tuple(
                WICopy(m, u, parse_rfc3339(t)) for m, u, t in data.get("wi_copies", [])
            ),
        )


class ChangeSeverity(str, Enum):
    UNCHANGED = "unchanged"
    MINOR = "minor"
    SIGNIFICANT = "significant"


_SEVERITY_RANK = {
    ChangeSeverity.UNCHANGED: 0,
    ChangeSeverity.MINOR: 1,
    ChangeSeverity.SIGNIFICANT: 2,
}


@dataclass(frozen=True)
class ChangeClass:
    kind: ChangeSeverity
    similarity: float

    @property
    def rank(self) -> int:
        return _SEVERITY_RANK[self.kind]


class DfTable:
    """Document-frequency statistics over the corpus of stored snapshots."""

    def __init__(self, document_count: int = 0, terms: dict[str, int] | None = None):
        self.document_count = document_count
        self._terms: dict[str, int] = dict(terms or {})

    def add_document(self, text: str) -> None:
        self.document_count += 1
        for term in set(tokenize(text)):
            self._terms[term] = self._terms.get(term, 0) + 1

    def df(self, term: str) -> int:
        return self._terms.get(term, 0)

    def to_dict(self) -> dict:
        return {"document_count": self.document_count, "terms": dict(self._terms)}

    @classmethod
    def from_dict(cls, data: dict) -> "DfTable":
        return cls(data.get("document_count", 0), data.get("terms", {}))


class _TextExtractor(HTMLParser):
    """Collects character data outside script/style elements."""

    _SKIP = {"script", "style"}

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self._chunks: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip_depth += 1

    def handle_endtag(self, tag):
        if tag in self._SKIP and self._skip_depth:
            self._skip_depth -= 1

    def handle_data(self, data):
        if not self._skip_depth:
            self._chunks.append(data)

    def text(self) -> str:
        return " ".join(self._chunks)


def _normalize(text: str) -> str:
    return " ".join(_TOKEN.findall(text.lower()))


def tokenize(text: str) -> list[str]:
    """Tokens of already-normalized text."""
    return text.split()


def extract_text(content: bytes, media_type: str) -> str:
    """Extract normalized text from a fetched body.

    HTML is stripped of markup, script, and style; plain text passes
    through; anything else degrades to empty text.  The result is
    lowercase with tokens (alphanumeric runs) joined by single spaces.
    """
    base_type = media_type.split(";", 1)[0].strip().lower()
    raw = content.decode("utf-8", errors="replace")
    if base_type in ("text/html", "application/xhtml+xml"):
        extractor = _TextExtractor()
        extractor.feed(raw)
        extractor.close()
        return _normalize(extractor.text())
    if base_type.startswith("text/"):
        return _normalize(raw)
    return ""


def lexical_signature(text: str, df: DfTable, size: int = SIGNATURE_SIZE) -> list[str]:
    """Pick up to ``size`` terms that best identify the text in a web search.

    Terms are scored tf * ln((N + 1) / (df + 1)) against the corpus
    statistics; stopwords are excluded, ties break lexicographically.
    """
    if df.document_count < 1:
        raise ValueError("document-frequency table is empty")
    tokens = tokenize(text)
    if not tokens:
        raise EmptyText("no tokens to build a signature from")
    counts = Counter(t for t in tokens if t not in STOPWORDS)
    n = df.document_count
    scored = sorted(
        counts.items(),
        key=lambda item: (-(item[1] * math.log((n + 1) / (df.df(item[0]) + 1))), item[0]),
    )
    return [term for term, _ in scored[:size]]


def content_digest(text: str) -> str:
    """SHA-256 over the UTF-8 bytes of the normalized text."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _shingles(tokens: list[str], size: int) -> set[tuple[str, ...]]:
    return {tuple(tokens[i : i + size]) for i in range(len(tokens) - size + 1)}


def similarity(a: str, b: str, shingle_size: int = SHINGLE_SIZE) -> float:
    """Jaccard coefficient over token shingles.

    Texts shorter than one shingle fall back to plain token sets.  Two
    empty texts are identical (1.0); exactly one empty text is a complete
    mismatch (0.0).
    """
    ta, tb = tokenize(a), tokenize(b)
    if not ta and not tb:
        return 1.0
    if not ta or not tb:
        return 0.0
    if len(ta) < shingle_size or len(tb) < shingle_size:
        sa: set = set(ta)
        sb: set = set(tb)
    else:
        sa = _shingles(ta, shingle_size)
        sb = _shingles(tb, shingle_size)
    return len(sa & sb) / len(sa | sb)


def classify_change(
    old: Fingerprint,
    new_text: str,
    minor_threshold: float = DEFAULT_MINOR_THRESHOLD,
) -> ChangeClass:
    """Grade how much a resource drifted from its stored fingerprint.

    Digest equality short-circuits to unchanged; otherwise the snapshot
    similarity decides minor vs significant.
    """
    if content_digest(new_text) == old.content_digest:
        return ChangeClass(ChangeSeverity.UNCHANGED, 1.0)
    s = similarity(old.text_snapshot, new_text)
    if s >= minor_threshold:
        return ChangeClass(ChangeSeverity.MINOR, s)
    return ChangeClass(ChangeSeverity.SIGNIFICANT, s)


def is_wrong_content(
    old: Fingerprint,
    new_text: str,
    wrong_threshold: float = DEFAULT_WRONG_CONTENT_THRESHOLD,
) -> bool:
    """Heuristic for a URI that still resolves but serves different content.

    True is only a candidate verdict; a human confirms before anything is
    flagged.
    """
    if content_digest(new_text) == old.content_digest:
        return False
    if similarity(old.text_snapshot, new_text) >= wrong_threshold:
        return False
    tokens = set(tokenize(new_text))
    return not any(term in tokens for term in old.lexical_signature)


ThumbnailRenderer = Callable[[str, str], "str | None"]


def text_preview_renderer(ar_uri: str, text_snapshot: str) -> str:
    """Default renderer: an inline preview card of the first 500 characters."""
    return "text:" + text_snapshot[:PREVIEW_CHARS]


def build_fingerprint(
    ar_uri: str,
    text: str,
    captured_at: datetime,
    df: DfTable,
    renderer: ThumbnailRenderer = text_preview_renderer,
    wi_copies: tuple[WICopy, ...] = (),
) -> Fingerprint:
    """Assemble a fingerprint from already-extracted text.

    The caller is responsible for having added the text to ``df`` first;
    this function never mutates the table.
    """
    snapshot = text[:SNAPSHOT_CHARS]
    try:
        signature = tuple(lexical_signature(text, df))
    except EmptyText:
        signature = ()
    return Fingerprint(
        ar_uri=ar_uri,
        lexical_signature=signature,
        content_digest=content_digest(text),
        text_snapshot=snapshot,
        thumbnail_ref=renderer(ar_uri, snapshot),
        captured_at=captured_at,
        wi_copies=wi_copies,
    )


