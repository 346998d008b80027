/**
 * Browser shell: hash routing, event wiring, and error banners.  All
 * rendering comes from views.ts; all service traffic goes through one
 * ApiClient built from config.json.
 */

import { ApiClient, ApiError } from "./api.js";
import { loadConfig, type UiConfig } from "./config.js";
import { startCheck, submitDecision, ValidationError } from "./controller.js";
import type { DecisionKind, SessionView } from "./types.js";
import {
  renderAttention,
  renderBanner,
  renderDashboard,
  renderHistory,
  renderRemList,
  renderTimeline,
} from "./views.js";

let client: ApiClient;
let config: UiConfig;
let currentSession: SessionView | null = null;

function app(): HTMLElement {
  const element = document.getElementById("app");
  if (!element) {
    throw new Error("missing #app container");
  }
  return element;
}

function showError(error: unknown): void {
  let banner: string;
  if (error instanceof ApiError) {
    banner =
      error.status === 409
        ? renderBanner("stale", `The session is out of date: ${error.message}`)
        : renderBanner("error", error.message);
  } else if (error instanceof ValidationError) {
    banner = renderBanner("error", error.message);
  } else {
    banner = renderBanner("unreachable", "The curation service is unreachable.");
  }
  app().insertAdjacentHTML("afterbegin", banner);
}

async function showRemList(): Promise<void> {
  const list = await client.listRems();
  app().innerHTML = renderRemList(list.rems);
}

async function showDashboard(key: string): Promise<void> {
  const info = await client.remInfo(key);
  const session = currentSession && currentSession.rem_key === key ? currentSession : null;
  app().innerHTML = renderDashboard(info, session);
}

async function runCheck(key: string): Promise<void> {
  const info = await client.remInfo(key);
  currentSession = await startCheck(client, key, "curator", {
    intervalMs: config.pollIntervalMs,
    onUpdate: (view) => {
      currentSession = view;
      app().innerHTML = renderDashboard(info, view);
    },
  });
  app().innerHTML = renderDashboard(info, currentSession);
}

async function showAttention(sessionId: string, entryId: string): Promise<void> {
  const view = currentSession?.session_id === sessionId ? currentSession : await client.session(sessionId);
  currentSession = view;
  const status = view.statuses.find((s) => s.entry_id === entryId);
  const aid = await client.attentionAid(sessionId, entryId);
  app().innerHTML = renderAttention(aid, status?.reason ?? null, config.engines);
}

async function showHistory(key: string): Promise<void> {
  const history = await client.history(key);
  app().innerHTML = renderHistory(history);
}

async function showTimeline(key: string): Promise<void> {
  const timeline = await client.timeline(key);
  app().innerHTML = renderTimeline(timeline);
}

async function route(): Promise<void> {
  const hash = window.location.hash || "#/";
  let match: RegExpMatchArray | null;
  try {
    if (hash === "#/") {
      await showRemList();
    } else if ((match = hash.match(/^#\/rem\/([^/]+)$/))) {
      await showDashboard(decodeURIComponent(match[1]));
    } else if ((match = hash.match(/^#\/rem\/([^/]+)\/history$/))) {
      await showHistory(decodeURIComponent(match[1]));
    } else if ((match = hash.match(/^#\/rem\/([^/]+)\/timeline$/))) {
      await showTimeline(decodeURIComponent(match[1]));
    } else if ((match = hash.match(/^#\/session\/([^/]+)\/attention\/([^/]+)$/))) {
      await showAttention(decodeURIComponent(match[1]), decodeURIComponent(match[2]));
    } else {
      app().innerHTML = `<p class="empty">Nothing here.</p>`;
    }
  } catch (error) {
    showError(error);
  }
}

async function onDecide(form: HTMLFormElement, kind: DecisionKind): Promise<void> {
  const entryId = form.dataset.entry ?? "";
  const sessionId = currentSession?.session_id;
  if (!sessionId) {
    return;
  }
  const uriInput = form.querySelector<HTMLInputElement>("input[name=new_uri]");
  const errorSlot = form.querySelector<HTMLElement>("[data-role=decision-error]");
  try {
    currentSession = await submitDecision(
      client,
      sessionId,
      entryId,
      kind,
      "curator",
      uriInput?.value || undefined,
    );
    window.location.hash = `#/rem/${encodeURIComponent(currentSession.rem_key)}`;
  } catch (error) {
    // relocate target refusals and stale sessions land inline, not as a page
    if (errorSlot && (error instanceof ApiError || error instanceof ValidationError)) {
      errorSlot.textContent = error.message;
      errorSlot.hidden = false;
    } else {
      showError(error);
    }
  }
}

async function onRollback(key: string, target: number): Promise<void> {
  try {
    await client.rollback(key, target, "curator");
    await showHistory(key);
  } catch (error) {
    showError(error);
  }
}

function wireEvents(): void {
  document.addEventListener("click", (event) => {
    const target = event.target as HTMLElement | null;
    if (!target) {
      return;
    }
    const decide = target.closest<HTMLElement>("[data-decide]");
    if (decide) {
      const form = decide.closest("form");
      if (form) {
        void onDecide(form, decide.dataset.decide as DecisionKind);
      }
      return;
    }
    const action = target.closest<HTMLElement>("[data-action]");
    if (!action) {
      return;
    }
    if (action.dataset.action === "check") {
      const key = action.closest<HTMLElement>("[data-key]")?.dataset.key;
      if (key) {
        void runCheck(key).catch(showError);
      }
    } else if (action.dataset.action === "rollback") {
      const key = action.closest<HTMLElement>("[data-key]")?.dataset.key;
      const targetRev = Number(action.dataset.target);
      if (key && Number.isFinite(targetRev)) {
        void onRollback(key, targetRev);
      }
    }
  });
  window.addEventListener("hashchange", () => {
    void route();
  });
}

async function bootstrap(): Promise<void> {
  config = await loadConfig((url, init) => fetch(url, init));
  client = new ApiClient(config.service);
  wireEvents();
  await route();
}

void bootstrap();
