"""Resource map domain model.

A resource map is an Atom feed that enumerates the resources making up an
aggregation.  The feed id names the aggregation, the feed's self link names
the map itself, and each entry's alternate link names one aggregated
resource.  This module parses, serializes, validates, and diffs such
documents; all types are immutable values.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from urllib.parse import urlsplit

from remcurator.clock import format_rfc3339, parse_rfc3339

ATOM_NS = "http://www.w3.org/2005/Atom"
ORE_SCHEME = "http://www.openarchives.org/ore/terms/"
# The canonical term plus the misspelling that circulates in old examples.
AGGREGATION_TERMS = (ORE_SCHEME + "Aggregation", ORE_SCHEME + "Aggreagation")
FLAG_SCHEME = "urn:remcurator:status"
FLAG_TERM = "flagged-gone"

_WS_RUN = re.compile(r"\s+")


class RemError(Exception):
    """Base for resource-map domain errors."""


class MalformedXml(RemError):
    pass


class MissingSelfLink(RemError):
    pass


class MissingFeedId(RemError):
    pass


class EntryWithoutAlternateLink(RemError):
    def __init__(self, entry_index: int):
        super().__init__(f"entry {entry_index} has no alternate link")
        self.entry_index = entry_index


class InvariantViolation(RemError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class ChangeKind(str, Enum):
    AR_ADDED = "ar-added"
    AR_REMOVED = "ar-removed"
    AR_MOVED = "ar-moved"
    AR_FLAGGED_GONE = "ar-flagged-gone"
    AR_REARCHIVED = "ar-rearchived"
    METADATA_EDITED = "metadata-edited"
    REM_METADATA_EDITED = "rem-metadata-edited"
    ROLLBACK = "rollback"


@dataclass(frozen=True)
class ChangeRecord:
    """One logged change to a resource map.

    ``old_value``/``new_value`` are plain text; moves carry the two URIs,
    metadata edits carry JSON objects of the changed fields.
    """

    kind: ChangeKind
    entry_id: str | None = None
    old_value: str | None = None
    new_value: str | None = None

    def __post_init__(self) -> None:
        if self.kind is ChangeKind.AR_MOVED:
            if not self.old_value or not self.new_value:
                raise ValueError("a move must carry both URIs")
            if self.old_value == self.new_value:
                raise ValueError("a move must change the URI")


@dataclass(frozen=True)
class AREntry:
    """One aggregated resource as described by an Atom entry."""

    entry_id: str
    ar_uri: str
    media_type: str = ""
    title: str = ""
    updated: datetime | None = None
    extra_metadata: tuple[tuple[str, str], ...] = ()
    flagged_gone: bool = False


@dataclass(frozen=True)
class ResourceMapDoc:
    rem_uri: str
    aggregation_uri: str
    title: str = ""
    authors: tuple[str, ...] = ()
    updated: datetime | None = None
    entries: tuple[AREntry, ...] = ()

    def entry(self, entry_id: str) -> AREntry:
        for e in self.entries:
            if e.entry_id == entry_id:
                return e
        raise KeyError(entry_id)

    def with_entries(self, entries) -> "ResourceMapDoc":
        return replace(self, entries=tuple(entries))


def _is_absolute_uri(uri: str) -> bool:
    if not uri:
        return False
    parts = urlsplit(uri)
    return bool(parts.scheme) and bool(parts.netloc or parts.path)


def _collapse_ws(text: str | None) -> str:
    if text is None:
        return ""
    return _WS_RUN.sub(" ", text).strip()


def _atom(tag: str) -> str:
    return f"{{{ATOM_NS}}}{tag}"


def _localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_updated(element: ET.Element | None, context: str) -> datetime:
    if element is None or not (element.text or "").strip():
        raise MalformedXml(f"{context} has no updated timestamp")
    try:
        return parse_rfc3339(element.text.strip())
    except ValueError as exc:
        raise MalformedXml(f"{context} has an invalid updated timestamp: {exc}") from exc


def _parse_entry(element: ET.Element, index: int) -> AREntry:
    id_el = element.find(_atom("id"))
    if id_el is None or not (id_el.text or "").strip():
        raise MalformedXml(f"entry {index} has no id")
    entry_id = id_el.text.strip()

    ar_uri = None
    media_type = ""
    for link in element.findall(_atom("link")):
        rel = link.get("rel", "alternate")  # Atom defaults rel to alternate
        if rel == "alternate" and ar_uri is None:
            ar_uri = link.get("href", "")
            media_type = link.get("type", "")
    if ar_uri is None:
        raise EntryWithoutAlternateLink(index)

    flagged = False
    extra: list[tuple[str, str]] = []
    for child in element:
        name = _localname(child.tag)
        if child.tag in (_atom("id"), _atom("title"), _atom("updated"), _atom("link")):
            continue
        if name == "category":
            if child.get("scheme") == FLAG_SCHEME and child.get("term") == FLAG_TERM:
                flagged = True
            continue
        extra.append((name, _collapse_ws("".join(child.itertext()))))

    return AREntry(
        entry_id=entry_id,
        ar_uri=ar_uri,
        media_type=media_type,
        title=_collapse_ws(element.findtext(_atom("title"))),
        updated=_parse_updated(element.find(_atom("updated")), f"entry {index}"),
        extra_metadata=tuple(extra),
        flagged_gone=flagged,
    )


def parse_rem(atom_text: bytes | str) -> ResourceMapDoc:
    """Parse an Atom resource map.

    The feed id supplies the aggregation URI, the first feed-level
    rel="self" link supplies the map URI, and each entry's alternate link
    supplies the resource URI.  Human-readable text (titles, author names)
    has whitespace runs collapsed.
    """
    if isinstance(atom_text, str):
        atom_text = atom_text.encode("utf-8")
    try:
        root = ET.fromstring(atom_text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc
    if root.tag != _atom("feed"):
        raise MalformedXml(f"root element is {root.tag}, not an Atom feed")

    id_el = root.find(_atom("id"))
    if id_el is None or not (id_el.text or "").strip():
        raise MissingFeedId("feed has no id element")
    aggregation_uri = id_el.text.strip()

    rem_uri = None
    for link in root.findall(_atom("link")):
        if link.get("rel") == "self":
            rem_uri = link.get("href", "")
            break  # later self links are ignored
    if not rem_uri:
        raise MissingSelfLink("feed has no rel=\"self\" link")

    authors = tuple(
        _collapse_ws(name.text)
        for author in root.findall(_atom("author"))
        for name in author.findall(_atom("name"))
        if (name.text or "").strip()
    )

    entries = tuple(
        _parse_entry(el, i) for i, el in enumerate(root.findall(_atom("entry")))
    )

    return ResourceMapDoc(
        rem_uri=rem_uri,
        aggregation_uri=aggregation_uri,
        title=_collapse_ws(root.findtext(_atom("title"))),
        authors=authors,
        updated=_parse_updated(root.find(_atom("updated")), "feed"),
        entries=entries,
    )


def serialize_rem(doc: ResourceMapDoc) -> bytes:
    """Serialize a resource map to UTF-8 Atom.

    The output shape is fixed: feed id = aggregation URI, one self link =
    map URI, an Aggregation category, then one entry per resource.  For any
    valid ``doc``, ``parse_rem(serialize_rem(doc)) == doc``.
    """
    violations = validate(doc)
    if violations:
        raise InvariantViolation(violations)

    ET.register_namespace("", ATOM_NS)
    feed = ET.Element(_atom("feed"))
    ET.SubElement(feed, _atom("id")).text = doc.aggregation_uri
    ET.SubElement(
        feed,
        _atom("link"),
        {"href": doc.rem_uri, "rel": "self", "type": "application/atom+xml"},
    )
    ET.SubElement(
        feed,
        _atom("category"),
        {
            "scheme": ORE_SCHEME,
            "term": ORE_SCHEME + "Aggregation",
            "label": "Aggregation",
        },
    )
    ET.SubElement(feed, _atom("title")).text = doc.title
    for author in doc.authors:
        author_el = ET.SubElement(feed, _atom("author"))
        ET.SubElement(author_el, _atom("name")).text = author
    ET.SubElement(feed, _atom("updated")).text = format_rfc3339(doc.updated)

    for entry in doc.entries:
        entry_el = ET.SubElement(feed, _atom("entry"))
        ET.SubElement(entry_el, _atom("id")).text = entry.entry_id
        link_attrs = {"href": entry.ar_uri, "rel": "alternate"}
        if entry.media_type:
            link_attrs["type"] = entry.media_type
        ET.SubElement(entry_el, _atom("link"), link_attrs)
        ET.SubElement(entry_el, _atom("title")).text = entry.title
        ET.SubElement(entry_el, _atom("updated")).text = format_rfc3339(entry.updated)
        if entry.flagged_gone:
            ET.SubElement(
                entry_el,
                _atom("category"),
                {"scheme": FLAG_SCHEME, "term": FLAG_TERM},
            )
        for key, value in entry.extra_metadata:
            ET.SubElement(entry_el, _atom(key)).text = value

    ET.indent(feed)
    return ET.tostring(feed, encoding="utf-8", xml_declaration=True)


def validate(doc: ResourceMapDoc) -> list[str]:
    """Check type invariants; an empty list means the document is valid."""
    violations: list[str] = []
    if not _is_absolute_uri(doc.rem_uri):
        violations.append(f"rem_uri: not an absolute URI: {doc.rem_uri!r}")
    if not _is_absolute_uri(doc.aggregation_uri):
        violations.append(
            f"aggregation_uri: not an absolute URI: {doc.aggregation_uri!r}"
        )
    if doc.rem_uri and doc.rem_uri == doc.aggregation_uri:
        violations.append(
            "rem_uri/aggregation_uri: the map and the aggregation must have distinct URIs"
        )
    if doc.updated is None or doc.updated.tzinfo is None:
        violations.append("updated: must be an aware UTC timestamp")

    seen: dict[str, int] = {}
    for i, entry in enumerate(doc.entries):
        if not entry.entry_id:
            violations.append(f"entries[{i}].entry_id: must be non-empty")
        elif entry.entry_id in seen:
            violations.append(
                f"entries[{i}].entry_id: duplicate of entries[{seen[entry.entry_id]}]"
                f" ({entry.entry_id!r})"
            )
        else:
            seen[entry.entry_id] = i
        if not entry.flagged_gone and not _is_absolute_uri(entry.ar_uri):
            violations.append(
                f"entries[{i}].ar_uri: not an absolute URI: {entry.ar_uri!r}"
            )
        if entry.updated is None or entry.updated.tzinfo is None:
            violations.append(f"entries[{i}].updated: must be an aware UTC timestamp")
    return violations


def _fields_json(pairs: dict[str, object]) -> str:
    return json.dumps(pairs, sort_keys=True, ensure_ascii=False)


def _entry_field_changes(old: AREntry, new: AREntry) -> tuple[dict, dict]:
    before: dict[str, object] = {}
    after: dict[str, object] = {}
    if old.title != new.title:
        before["title"], after["title"] = old.title, new.title
    if old.updated != new.updated:
        before["updated"] = format_rfc3339(old.updated)
        after["updated"] = format_rfc3339(new.updated)
    if old.extra_metadata != new.extra_metadata:
        before["extra_metadata"] = [list(p) for p in old.extra_metadata]
        after["extra_metadata"] = [list(p) for p in new.extra_metadata]
    if old.flagged_gone and not new.flagged_gone:
        before["flagged_gone"], after["flagged_gone"] = True, False
    if old.media_type != new.media_type:
        before["media_type"], after["media_type"] = old.media_type, new.media_type
    return before, after


def diff_rems(old: ResourceMapDoc, new: ResourceMapDoc) -> list[ChangeRecord]:
    """Structural diff of two resource maps.

    Entries are matched by entry id, so a URI change on a matched entry is
    reported as a move rather than a remove/add pair.  Output order is
    removals, additions, moves, entry metadata edits, then feed-level
    metadata edits.
    """
    old_by_id = {e.entry_id: e for e in old.entries}
    new_by_id = {e.entry_id: e for e in new.entries}

    records: list[ChangeRecord] = []
    for entry in old.entries:
        if entry.entry_id not in new_by_id:
            records.append(
                ChangeRecord(
                    ChangeKind.AR_REMOVED,
                    entry_id=entry.entry_id,
                    old_value=entry.ar_uri,
                )
            )
    for entry in new.entries:
        if entry.entry_id not in old_by_id:
            records.append(
                ChangeRecord(
                    ChangeKind.AR_ADDED,
                    entry_id=entry.entry_id,
                    new_value=entry.ar_uri,
                )
            )
    for entry in new.entries:
        before = old_by_id.get(entry.entry_id)
        if before is not None and before.ar_uri != entry.ar_uri:
            records.append(
                ChangeRecord(
                    ChangeKind.AR_MOVED,
                    entry_id=entry.entry_id,
                    old_value=before.ar_uri,
                    new_value=entry.ar_uri,
                )
            )
    for entry in new.entries:
        before = old_by_id.get(entry.entry_id)
        if before is None:
            continue
        if not before.flagged_gone and entry.flagged_gone:
            records.append(
                ChangeRecord(
                    ChangeKind.AR_FLAGGED_GONE,
                    entry_id=entry.entry_id,
                    old_value=entry.ar_uri,
                )
            )
        changed_before, changed_after = _entry_field_changes(before, entry)
        if changed_before:
            records.append(
                ChangeRecord(
                    ChangeKind.METADATA_EDITED,
                    entry_id=entry.entry_id,
                    old_value=_fields_json(changed_before),
                    new_value=_fields_json(changed_after),
                )
            )

    feed_before: dict[str, object] = {}
    feed_after: dict[str, object] = {}
    if old.title != new.title:
        feed_before["title"], feed_after["title"] = old.title, new.title
    if old.authors != new.authors:
        feed_before["authors"] = list(old.authors)
        feed_after["authors"] = list(new.authors)
    if feed_before:
        records.append(
            ChangeRecord(
                ChangeKind.REM_METADATA_EDITED,
                old_value=_fields_json(feed_before),
                new_value=_fields_json(feed_after),
            )
        )
    return records


def change_record_to_dict(record: ChangeRecord) -> dict:
    return {
        "kind": record.kind.value,
        "entry_id": record.entry_id,
        "old_value": record.old_value,
        "new_value": record.new_value,
    }


def change_record_from_dict(data: dict) -> ChangeRecord:
    return ChangeRecord(
        kind=ChangeKind(data["kind"]),
        entry_id=data.get("entry_id"),
        old_value=data.get("old_value"),
        new_value=data.get("new_value"),
    )
