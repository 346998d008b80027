/**
 * Mirrors of the curation service's JSON schemas.  The dashboard renders
 * these as delivered; it never derives curation state of its own.
 */

export type ArState = "ok" | "pending" | "needs-attention" | "flagged-gone";

export type AttentionReason =
  | "missing"
  | "wrong-content-candidate"
  | "changed-minor"
  | "changed-significant";

export type DecisionKind = "relocate" | "flag-gone" | "rearchive" | "accept-minor";

export type SessionState = "pending" | "open" | "closed";

export interface ArStatus {
  entry_id: string;
  ar_uri: string;
  state: ArState;
  reason: AttentionReason | null;
  similarity: number | null;
  detail: string;
}

export interface ExternalChange {
  kind: string;
  entry_id: string | null;
  old_value: string | null;
  new_value: string | null;
}

export interface Decision {
  kind: DecisionKind;
  entry_id: string;
  actor: string;
  decided_at: string;
  new_uri: string | null;
}

export interface SessionView {
  session_id: string;
  rem_key: string;
  actor: string;
  state: SessionState;
  rem_missing: boolean;
  base_rev: number;
  final_rev: number | null;
  external_changes: ExternalChange[];
  statuses: ArStatus[];
  attention: string[];
  decisions: Decision[];
}

export interface WiCopy {
  member_id: string;
  archived_uri: string;
  captured_at: string;
}

export interface AttentionAid {
  entry_id: string;
  ar_uri: string;
  title: string;
  wi_copies: WiCopy[];
  queries: string[];
  signature: string[];
  text_snapshot: string;
  thumbnail_ref: string | null;
  last_known_at: string | null;
}

export interface RemEntry {
  entry_id: string;
  ar_uri: string;
  title: string;
  flagged_gone: boolean;
}

export interface RemInfo {
  rem_key: string;
  rem_uri: string;
  registered_at: string;
  title: string;
  authors: string[];
  head_rev: number;
  head_snapshot: string;
  last_session: string | null;
  last_statuses: ArStatus[] | null;
  entries: RemEntry[];
}

export interface RemList {
  rems: RemInfo[];
}

export interface RegisterResult {
  rem_key: string;
  rev_id: number;
  ar_results: Record<string, string>;
}

export interface RevisionSummary {
  rev_id: number;
  parent: number | null;
  committed_at: string;
  actor: string;
  note: string;
  change_kinds: string[];
}

export interface HistoryView {
  rem_key: string;
  revisions: RevisionSummary[];
}

export interface FinalizeResult {
  rev_id: number;
  committed: boolean;
  session: SessionView;
}

export interface TimelineEvent {
  entry_id: string;
  ar_uri: string;
  at: string;
  kind: string;
  label: string;
}

export interface TimelineLane {
  entry_id: string;
  ar_uri: string;
  events: TimelineEvent[];
}

export interface TimelineExport {
  rem_key: string;
  entries: TimelineLane[];
}
