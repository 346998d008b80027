"""Curation of OAI-ORE Resource Maps against the ambient web infrastructure.

Register an Atom-serialized Resource Map and the package archives it and
its aggregated resources into simulated (or real) archive members, then
helps a human curator spot and repair link rot and content drift over
time, with a wiki-style revision history and a per-resource change
timeline.
"""

from remcurator.clock import SimulatedClock, WallClock, format_rfc3339, parse_rfc3339
from remcurator.curator import (
    ARState,
    ARStatus,
    AttentionReason,
    CurationSession,
    Curator,
    Decision,
    DecisionKind,
    EventKind,
    RegistrationResult,
    TimelineEvent,
    rem_key,
)
from remcurator.fingerprint import (
    ChangeClass,
    ChangeSeverity,
    DfTable,
    Fingerprint,
    build_fingerprint,
    classify_change,
    content_digest,
    extract_text,
    is_wrong_content,
    lexical_signature,
    similarity,
)
from remcurator.ore import (
    AREntry,
    ChangeKind,
    ChangeRecord,
    ResourceMapDoc,
    diff_rems,
    parse_rem,
    serialize_rem,
    validate,
)
from remcurator.revisions import Revision, RevisionStore
from remcurator.webfetch import (
    FetchKind,
    FetchOutcome,
    Gone,
    HttpFetcher,
    Redirect,
    ScriptedResource,
    Serve,
    SimulatedWeb,
    TimelineEntry,
    fetch_all,
    load_script,
)
from remcurator.wi import (
    Capability,
    MemberKind,
    RelocationAid,
    SimulatedMember,
    WIMemberDescriptor,
    WIRecord,
    WIRegistry,
    build_relocation_queries,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
