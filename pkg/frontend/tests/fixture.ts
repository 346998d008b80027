/**
 * In-memory stand-in for the curation service, speaking the documented
 * JSON API through a FetchLike.  It mimics the service's observable
 * behavior (pending rows that resolve after a few polls, decision rules,
 * finalize, rollback) and keeps a `mutations` log so tests can prove the
 * dashboard never changes state except through documented POSTs.
 */

import type { FetchLike } from "../src/api.js";
import type {
  ArStatus,
  AttentionAid,
  AttentionReason,
  Decision,
  DecisionKind,
  RemEntry,
  RemInfo,
  RevisionSummary,
  SessionView,
  TimelineEvent,
  TimelineExport,
} from "../src/types.js";

export const KEY = "almanac-2024";
export const BASE = "http://fixture.test";

const T0 = "2024-03-01T09:00:00Z";
const T1 = "2024-04-10T09:00:00Z";
const NOW = "2024-06-02T14:30:00Z";

const EVENT_LABELS: Record<string, string> = {
  "first-archived": "First archived",
  "minor-change": "Minor change",
  "significant-change": "Significant change",
  moved: "Moved",
  missing: "Missing",
  "flagged-gone": "Flagged gone",
  rearchived: "Re-archived",
};

interface Fate {
  state: "ok" | "needs-attention" | "flagged-gone";
  reason: AttentionReason | null;
  similarity: number | null;
  detail: string;
}

/** entry id, uri, title, what the check will find */
const SEED: Array<[string, string, string, Fate]> = [
  ["notes", "http://coast.example/notes", "Field Notes, Spring Survey",
    { state: "ok", reason: null, similarity: 1.0, detail: "" }],
  ["chart", "http://coast.example/chart", "Tide Chart 2024",
    { state: "needs-attention", reason: "missing", similarity: null, detail: "gone" }],
  ["appendix", "http://coast.example/appendix", "Instrument Appendix",
    { state: "needs-attention", reason: "missing", similarity: null, detail: "timeout" }],
  ["gauge", "http://coast.example/gauge", "Gauge Calibration Tables",
    { state: "needs-attention", reason: "changed-significant", similarity: 0.31, detail: "" }],
  ["glossary", "http://coast.example/glossary", "Glossary of Shore Terms",
    { state: "needs-attention", reason: "changed-minor", similarity: 0.84, detail: "" }],
  ["retired", "http://coast.example/retired", "Retired Station Listing",
    { state: "flagged-gone", reason: null, similarity: null, detail: "" }],
];

interface InternalSession {
  view: SessionView;
  polls: number;
  stagedChangeKinds: string[];
  stagedEvents: TimelineEvent[];
}

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function fail(status: number, message: string): Response {
  return json({ error: message }, status);
}

function event(entryId: string, uri: string, at: string, kind: string): TimelineEvent {
  return { entry_id: entryId, ar_uri: uri, at, kind, label: EVENT_LABELS[kind] };
}

export class FixtureService {
  /** every state change a client caused, in order */
  readonly mutations: string[] = [];
  /** how many GET /sessions/{id} polls before a session resolves */
  resolveAfterPolls: number;

  private entries: RemEntry[];
  private fates: Map<string, Fate>;
  private revisions: RevisionSummary[];
  private events: TimelineEvent[];
  private sessions = new Map<string, InternalSession>();
  private nextSession = 1;
  private lastSession: string | null = null;

  constructor(options: { resolveAfterPolls?: number } = {}) {
    this.resolveAfterPolls = options.resolveAfterPolls ?? 1;
    this.entries = SEED.map(([entry_id, ar_uri, title]) => ({
      entry_id,
      ar_uri,
      title,
      flagged_gone: entry_id === "retired",
    }));
    this.fates = new Map(SEED.map(([id, , , fate]) => [id, { ...fate }]));
    this.revisions = [
      {
        rev_id: 1, parent: null, committed_at: T0, actor: "archivist",
        note: "registered", change_kinds: SEED.map(() => "ar-added"),
      },
      {
        rev_id: 2, parent: 1, committed_at: T1, actor: "archivist",
        note: "curation session s0000", change_kinds: ["ar-flagged-gone"],
      },
    ];
    this.events = [
      ...SEED.map(([id, uri]) => event(id, uri, T0, "first-archived")),
      event("retired", "http://coast.example/retired", T1, "flagged-gone"),
    ];
  }

  get fetch(): FetchLike {
    return (url, init) => Promise.resolve(this.handle(url, init));
  }

  private handle(url: string, init?: RequestInit): Response {
    const method = (init?.method ?? "GET").toUpperCase();
    const path = new URL(url).pathname;
    const body = init?.body ? (JSON.parse(String(init.body)) as Record<string, unknown>) : {};
    let match: RegExpMatchArray | null;

    if (method === "GET" && path === "/rems") {
      return json({ rems: [this.remInfo()] });
    }
    if ((match = path.match(/^\/rems\/([^/]+)$/)) && method === "GET") {
      return match[1] === KEY ? json(this.remInfo()) : fail(404, `no resource map ${match[1]}`);
    }
    if ((match = path.match(/^\/rems\/([^/]+)\/sessions$/)) && method === "POST") {
      if (match[1] !== KEY) {
        return fail(404, `no resource map ${match[1]}`);
      }
      return this.openSession(String(body.actor ?? "anonymous"), Boolean(body.wait));
    }
    if ((match = path.match(/^\/sessions\/([^/]+)$/)) && method === "GET") {
      const session = this.sessions.get(match[1]);
      if (!session) {
        return fail(404, `no session ${match[1]}`);
      }
      session.polls += 1;
      if (session.view.state === "pending" && session.polls >= this.resolveAfterPolls) {
        this.resolve(session);
      }
      return json(session.view);
    }
    if ((match = path.match(/^\/sessions\/([^/]+)\/attention\/([^/]+)$/)) && method === "GET") {
      return this.attention(match[1], decodeURIComponent(match[2]));
    }
    if ((match = path.match(/^\/sessions\/([^/]+)\/decisions$/)) && method === "POST") {
      return this.decide(match[1], body);
    }
    if ((match = path.match(/^\/sessions\/([^/]+)\/finalize$/)) && method === "POST") {
      return this.finalize(match[1], String(body.actor ?? "anonymous"));
    }
    if ((match = path.match(/^\/rems\/([^/]+)\/history$/)) && method === "GET") {
      return json({ rem_key: KEY, revisions: this.revisions });
    }
    if ((match = path.match(/^\/rems\/([^/]+)\/rollback$/)) && method === "POST") {
      return this.rollback(Number(body.target), String(body.actor ?? "anonymous"));
    }
    if ((match = path.match(/^\/rems\/([^/]+)\/timeline$/)) && method === "GET") {
      return json(this.timeline());
    }
    return fail(404, `no route ${method} ${path}`);
  }

  private remInfo(): RemInfo {
    const last = this.lastSession ? this.sessions.get(this.lastSession) : undefined;
    return {
      rem_key: KEY,
      rem_uri: "http://coast.example/almanac.atom",
      registered_at: T0,
      title: "Coastal Almanac 2024",
      authors: ["R. Calloway"],
      head_rev: this.revisions[this.revisions.length - 1].rev_id,
      head_snapshot: "<feed/>",
      last_session: this.lastSession,
      last_statuses: last ? last.view.statuses : null,
      entries: this.entries.map((e) => ({ ...e })),
    };
  }

  private openSession(actor: string, wait: boolean): Response {
    const id = `s${String(this.nextSession++).padStart(4, "0")}`;
    const statuses: ArStatus[] = this.entries.map((e) => ({
      entry_id: e.entry_id,
      ar_uri: e.ar_uri,
      state: e.flagged_gone ? "flagged-gone" : "pending",
      reason: null,
      similarity: null,
      detail: "",
    }));
    const session: InternalSession = {
      view: {
        session_id: id,
        rem_key: KEY,
        actor,
        state: "pending",
        rem_missing: false,
        base_rev: this.revisions[this.revisions.length - 1].rev_id,
        final_rev: null,
        external_changes: [],
        statuses,
        attention: [],
        decisions: [],
      },
      polls: 0,
      stagedChangeKinds: [],
      stagedEvents: [],
    };
    this.sessions.set(id, session);
    this.lastSession = id;
    this.mutations.push(`open-session ${id}`);
    if (wait) {
      this.resolve(session);
    }
    return json(session.view, 201);
  }

  private resolve(session: InternalSession): void {
    for (const status of session.view.statuses) {
      if (status.state !== "pending") {
        continue;
      }
      const fate = this.fates.get(status.entry_id)!;
      status.state = fate.state;
      status.reason = fate.reason;
      status.similarity = fate.similarity;
      status.detail = fate.detail;
    }
    session.view.state = "open";
    session.view.attention = session.view.statuses
      .filter((s) => s.state === "needs-attention")
      .map((s) => s.entry_id);
  }

  private attention(sessionId: string, entryId: string): Response {
    const session = this.sessions.get(sessionId);
    if (!session) {
      return fail(404, `no session ${sessionId}`);
    }
    const status = session.view.statuses.find((s) => s.entry_id === entryId);
    if (!status || status.state !== "needs-attention") {
      return fail(409, `entry ${entryId} is not awaiting review`);
    }
    const title = this.entries.find((e) => e.entry_id === entryId)?.title ?? entryId;
    const aid: AttentionAid = {
      entry_id: entryId,
      ar_uri: status.ar_uri,
      title,
      wi_copies: [
        { member_id: "webcite", archived_uri: `http://webcite.example/cache/${entryId}`, captured_at: "2024-05-20T01:00:00Z" },
        { member_id: "ia", archived_uri: `http://ia.example/web/${entryId}`, captured_at: T0 },
      ],
      queries: [
        `"${title}"`,
        `"${title}" "R. Calloway"`,
        "tide harbor datum spring neap survey",
      ],
      signature: ["tide", "harbor", "datum", "spring", "neap"],
      text_snapshot: `The ${title} opens with readings taken at the harbor datum...`,
      thumbnail_ref: null,
      last_known_at: "2024-05-20T01:00:00Z",
    };
    return json(aid);
  }

  private decide(sessionId: string, body: Record<string, unknown>): Response {
    const session = this.sessions.get(sessionId);
    if (!session) {
      return fail(404, `no session ${sessionId}`);
    }
    if (session.view.state === "closed") {
      return fail(409, `session ${sessionId} is closed`);
    }
    const entryId = String(body.entry_id ?? "");
    const kind = String(body.kind ?? "") as DecisionKind;
    const status = session.view.statuses.find((s) => s.entry_id === entryId);
    if (!status || status.state !== "needs-attention") {
      return fail(409, `entry ${entryId} is not awaiting review`);
    }
    if (kind === "relocate") {
      const newUri = String(body.new_uri ?? "");
      if (!newUri) {
        return fail(400, "relocate needs the new URI");
      }
      if (newUri.includes("dead")) {
        return fail(409, `relocation target ${newUri} is unfetchable: gone`);
      }
      status.ar_uri = newUri;
      status.state = "ok";
      session.stagedChangeKinds.push("ar-moved");
      session.stagedEvents.push(event(entryId, newUri, NOW, "moved"));
      const entry = this.entries.find((e) => e.entry_id === entryId)!;
      entry.ar_uri = newUri;
    } else if (kind === "flag-gone") {
      status.state = "flagged-gone";
      session.stagedChangeKinds.push("ar-flagged-gone");
      session.stagedEvents.push(event(entryId, status.ar_uri, NOW, "flagged-gone"));
      this.entries.find((e) => e.entry_id === entryId)!.flagged_gone = true;
    } else if (kind === "rearchive") {
      status.state = "ok";
      session.stagedChangeKinds.push("ar-rearchived");
      session.stagedEvents.push(event(entryId, status.ar_uri, NOW, "rearchived"));
    } else if (kind === "accept-minor") {
      if (status.reason !== "changed-minor") {
        return fail(400, "accept-minor only applies to minor drift");
      }
      status.state = "ok";
      session.stagedEvents.push(event(entryId, status.ar_uri, NOW, "minor-change"));
    } else {
      return fail(400, `unknown decision kind '${kind}'`);
    }
    status.reason = null;
    status.similarity = null;
    status.detail = "";
    const decision: Decision = {
      kind,
      entry_id: entryId,
      actor: String(body.actor ?? "anonymous"),
      decided_at: NOW,
      new_uri: kind === "relocate" ? String(body.new_uri) : null,
    };
    session.view.decisions.push(decision);
    session.view.attention = session.view.attention.filter((id) => id !== entryId);
    this.mutations.push(`decision ${entryId} ${kind}`);
    return json(session.view);
  }

  private finalize(sessionId: string, actor: string): Response {
    const session = this.sessions.get(sessionId);
    if (!session) {
      return fail(404, `no session ${sessionId}`);
    }
    if (session.view.state === "closed") {
      return fail(409, `session ${sessionId} is closed`);
    }
    const open = session.view.statuses.filter((s) => s.state === "needs-attention");
    if (open.length > 0) {
      return fail(409, `${open.length} entries still need attention`);
    }
    session.view.state = "closed";
    let revId = session.view.base_rev;
    if (session.stagedChangeKinds.length > 0) {
      revId = this.revisions[this.revisions.length - 1].rev_id + 1;
      this.revisions.push({
        rev_id: revId,
        parent: session.view.base_rev,
        committed_at: NOW,
        actor,
        note: `curation session ${sessionId}`,
        change_kinds: [...session.stagedChangeKinds],
      });
    }
    this.events.push(...session.stagedEvents);
    session.view.final_rev = revId;
    this.mutations.push(`finalize ${sessionId}`);
    return json({
      rev_id: revId,
      committed: revId !== session.view.base_rev,
      session: session.view,
    });
  }

  private rollback(target: number, actor: string): Response {
    const head = this.revisions[this.revisions.length - 1];
    if (!this.revisions.some((r) => r.rev_id === target)) {
      return fail(404, `no revision ${target}`);
    }
    if (target === head.rev_id) {
      return fail(409, `revision ${target} is already the head`);
    }
    const revision: RevisionSummary = {
      rev_id: head.rev_id + 1,
      parent: head.rev_id,
      committed_at: NOW,
      actor,
      note: `rollback to revision ${target}`,
      change_kinds: ["rollback"],
    };
    this.revisions.push(revision);
    this.mutations.push(`rollback ${target}`);
    return json(revision);
  }

  private timeline(): TimelineExport {
    const lanes = new Map<string, TimelineEvent[]>();
    for (const e of this.events) {
      const lane = lanes.get(e.entry_id) ?? [];
      lane.push(e);
      lanes.set(e.entry_id, lane);
    }
    const ordered = [...lanes.entries()].sort((a, b) => {
      const byTime = a[1][0].at.localeCompare(b[1][0].at);
      return byTime !== 0 ? byTime : a[0].localeCompare(b[0]);
    });
    return {
      rem_key: KEY,
      entries: ordered.map(([entry_id, lane]) => ({
        entry_id,
        ar_uri: lane[lane.length - 1].ar_uri,
        events: lane,
      })),
    };
  }
}

export interface RecordedCall {
  method: string;
  url: string;
  status: number;
}

/** Wrap a FetchLike so every call lands in `calls` with its outcome. */
export function recordingFetch(inner: FetchLike, calls: RecordedCall[]): FetchLike {
  return async (url, init) => {
    const method = (init?.method ?? "GET").toUpperCase();
    const response = await inner(url, init);
    calls.push({ method, url, status: response.status });
    return response;
  };
}

/** The endpoints docs/http-api.md documents, as method + path patterns. */
export const DOCUMENTED_CALLS: Array<[string, RegExp]> = [
  ["GET", /^\/rems$/],
  ["POST", /^\/rems$/],
  ["GET", /^\/rems\/[^/]+$/],
  ["POST", /^\/rems\/[^/]+\/sessions$/],
  ["GET", /^\/sessions\/[^/]+$/],
  ["GET", /^\/sessions\/[^/]+\/attention\/[^/]+$/],
  ["POST", /^\/sessions\/[^/]+\/decisions$/],
  ["POST", /^\/sessions\/[^/]+\/finalize$/],
  ["GET", /^\/rems\/[^/]+\/history$/],
  ["GET", /^\/rems\/[^/]+\/revisions\/[^/]+$/],
  ["POST", /^\/rems\/[^/]+\/rollback$/],
  ["GET", /^\/rems\/[^/]+\/timeline$/],
];

export function isDocumented(call: RecordedCall): boolean {
  const path = new URL(call.url).pathname;
  return DOCUMENTED_CALLS.some(([method, pattern]) => method === call.method && pattern.test(path));
}
