/**
 * HTML string renderers.  Pure functions of API payloads plus the client
 * config; the app shell owns the DOM and event wiring.  Everything that
 * came over the wire goes through escapeHtml on the way into markup.
 */

import type { EngineLink } from "./config.js";
import { engineUrl } from "./config.js";
import type {
  ArState,
  ArStatus,
  AttentionAid,
  AttentionReason,
  HistoryView,
  RemInfo,
  SessionView,
  TimelineExport,
} from "./types.js";

export function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const BADGE_LABELS: Record<ArState, string> = {
  ok: "Ok",
  pending: "Checking…",
  "needs-attention": "Needs attention",
  "flagged-gone": "Flagged gone",
};

const REASON_LABELS: Record<AttentionReason, string> = {
  missing: "Missing",
  "wrong-content-candidate": "Wrong content?",
  "changed-minor": "Minor change",
  "changed-significant": "Significant change",
};

export function badge(state: ArState): string {
  return `<span class="badge badge-${state}">${BADGE_LABELS[state]}</span>`;
}

export function renderBanner(kind: "unreachable" | "stale" | "error", message: string): string {
  return `<div class="banner banner-${kind}">${escapeHtml(message)}</div>`;
}

export function renderRemList(rems: RemInfo[]): string {
  if (rems.length === 0) {
    return `<p class="empty">Nothing registered yet.</p>`;
  }
  const rows = rems
    .map(
      (rem) => `
        <tr>
          <td><a href="#/rem/${encodeURIComponent(rem.rem_key)}">${escapeHtml(rem.title || rem.rem_key)}</a></td>
          <td>${escapeHtml(rem.authors.join(", "))}</td>
          <td>${rem.entries.length}</td>
          <td>r${rem.head_rev}</td>
        </tr>`,
    )
    .join("");
  return `
    <table class="rem-list">
      <thead><tr><th>Resource Map</th><th>Authors</th><th>Resources</th><th>Head</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

function titlesByEntry(info: RemInfo): Map<string, string> {
  return new Map(info.entries.map((e) => [e.entry_id, e.title]));
}

export function renderStatusRows(statuses: ArStatus[], info: RemInfo, sessionId: string | null): string {
  const titles = titlesByEntry(info);
  const rows = statuses
    .map((status) => {
      const reason = status.reason ? REASON_LABELS[status.reason] : "";
      const similarity = status.similarity === null ? "" : status.similarity.toFixed(2);
      const review =
        status.state === "needs-attention" && sessionId
          ? `<a class="btn" href="#/session/${encodeURIComponent(sessionId)}/attention/${encodeURIComponent(status.entry_id)}">Review</a>`
          : "";
      return `
        <tr class="status-row" data-entry="${escapeHtml(status.entry_id)}" data-state="${status.state}">
          <td>${escapeHtml(titles.get(status.entry_id) ?? status.entry_id)}</td>
          <td class="uri"><a href="${escapeHtml(status.ar_uri)}" target="_blank" rel="noopener">${escapeHtml(status.ar_uri)}</a></td>
          <td>${badge(status.state)}</td>
          <td>${escapeHtml(reason)}</td>
          <td class="num">${similarity}</td>
          <td>${review}</td>
        </tr>`;
    })
    .join("");
  return `
    <table class="status-table">
      <thead><tr><th>Resource</th><th>URI</th><th>Status</th><th>Why</th><th>Similarity</th><th></th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

export function renderDashboard(info: RemInfo, session: SessionView | null): string {
  const statuses = session ? session.statuses : (info.last_statuses ?? null);
  const sessionId = session ? session.session_id : info.last_session;
  const body = statuses
    ? renderStatusRows(statuses, info, sessionId)
    : `<p class="empty">Not checked yet.</p>`;
  const externals =
    session && session.external_changes.length > 0
      ? `<p class="note">Publisher edits adopted: ${session.external_changes
          .map((c) => escapeHtml(c.kind))
          .join(", ")}</p>`
      : "";
  const missing =
    session && session.rem_missing
      ? renderBanner("error", "The Resource Map URI itself no longer resolves; working from the head revision.")
      : "";
  return `
    <section class="dashboard" data-key="${escapeHtml(info.rem_key)}">
      <header>
        <h2>${escapeHtml(info.title || info.rem_key)}</h2>
        <p class="meta">${escapeHtml(info.authors.join(", "))} &middot; head r${info.head_rev}</p>
        <nav>
          <a href="#/rem/${encodeURIComponent(info.rem_key)}/history">History</a>
          <a href="#/rem/${encodeURIComponent(info.rem_key)}/timeline">Timeline</a>
          <button class="btn btn-primary" data-action="check">Check now</button>
        </nav>
      </header>
      ${missing}
      ${externals}
      ${body}
    </section>`;
}

export function renderAttention(
  aid: AttentionAid,
  reason: AttentionReason | null,
  engines: EngineLink[],
): string {
  const wrongContent =
    reason === "wrong-content-candidate"
      ? renderBanner("error", "The URI may point to the wrong content now; compare the preview before deciding.")
      : "";
  const copies =
    aid.wi_copies.length === 0
      ? `<p class="empty">No archived copies found.</p>`
      : `<ol class="copies">${aid.wi_copies
          .map(
            (copy) => `
              <li data-member="${escapeHtml(copy.member_id)}">
                <a href="${escapeHtml(copy.archived_uri)}" target="_blank" rel="noopener">${escapeHtml(copy.member_id)}</a>
                <span class="when">${escapeHtml(copy.captured_at)}</span>
              </li>`,
          )
          .join("")}</ol>`;
  const queries = aid.queries
    .map((query) => {
      const links = engines
        .map(
          (engine) =>
            `<a class="engine" href="${escapeHtml(engineUrl(engine, query))}" target="_blank" rel="noopener">${escapeHtml(engine.name)}</a>`,
        )
        .join(" ");
      return `<li><code>${escapeHtml(query)}</code> ${links}</li>`;
    })
    .join("");
  const signature = aid.signature.map((term) => `<span class="term">${escapeHtml(term)}</span>`).join(" ");
  const preview = aid.thumbnail_ref ?? aid.text_snapshot;
  return `
    <section class="attention" data-entry="${escapeHtml(aid.entry_id)}">
      <h2>${escapeHtml(aid.title || aid.entry_id)}</h2>
      <p class="uri">${escapeHtml(aid.ar_uri)}</p>
      ${wrongContent}
      <h3>Archived copies</h3>
      ${copies}
      <h3>Find it again</h3>
      <ul class="queries">${queries}</ul>
      <p class="signature">Signature: ${signature}</p>
      <h3>Last good capture${aid.last_known_at ? ` (${escapeHtml(aid.last_known_at)})` : ""}</h3>
      <blockquote class="preview">${escapeHtml(preview)}</blockquote>
      <form class="decision-form" data-entry="${escapeHtml(aid.entry_id)}">
        <input name="new_uri" type="url" placeholder="https://its-new-home.example/" />
        <button type="button" class="btn" data-decide="relocate">Relocate</button>
        <button type="button" class="btn" data-decide="flag-gone">Flag gone</button>
        <button type="button" class="btn" data-decide="rearchive">Rearchive</button>
        <button type="button" class="btn" data-decide="accept-minor">Accept minor</button>
        <p class="error" data-role="decision-error" hidden></p>
      </form>
    </section>`;
}

export function renderHistory(history: HistoryView): string {
  const head = history.revisions.reduce((max, r) => Math.max(max, r.rev_id), 0);
  const rows = history.revisions
    .map((revision) => {
      const rollback =
        revision.rev_id === head
          ? `<span class="badge badge-head">head</span>`
          : `<button class="btn" data-action="rollback" data-target="${revision.rev_id}">Roll back to this</button>`;
      return `
        <tr class="revision-row" data-rev="${revision.rev_id}">
          <td>r${revision.rev_id}</td>
          <td>${escapeHtml(revision.committed_at)}</td>
          <td>${escapeHtml(revision.actor)}</td>
          <td>${revision.change_kinds.map((kind) => `<code>${escapeHtml(kind)}</code>`).join(" ")}</td>
          <td>${escapeHtml(revision.note)}</td>
          <td>${rollback}</td>
        </tr>`;
    })
    .join("");
  return `
    <section class="history" data-key="${escapeHtml(history.rem_key)}">
      <h2>Revisions</h2>
      <table class="history-table">
        <thead><tr><th>Rev</th><th>When</th><th>Actor</th><th>Changes</th><th>Note</th><th></th></tr></thead>
        <tbody>${rows}</tbody>
      </table>
    </section>`;
}

export function renderTimeline(timeline: TimelineExport): string {
  if (timeline.entries.length === 0) {
    return `<p class="empty">No events yet.</p>`;
  }
  const lanes = timeline.entries
    .map((lane) => {
      const markers = lane.events
        .map(
          (event) => `
            <span class="marker" data-kind="${escapeHtml(event.kind)}" title="${escapeHtml(event.at)}">
              ${escapeHtml(event.label)} <time>${escapeHtml(event.at.slice(0, 10))}</time>
            </span>`,
        )
        .join("");
      return `
        <div class="lane" data-entry="${escapeHtml(lane.entry_id)}">
          <div class="lane-label">
            <span class="lane-title">${escapeHtml(lane.entry_id)}</span>
            <span class="lane-uri">${escapeHtml(lane.ar_uri)}</span>
          </div>
          <div class="lane-track">${markers}</div>
        </div>`;
    })
    .join("");
  return `<section class="timeline">${lanes}</section>`;
}
