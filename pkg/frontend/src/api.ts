/**
 * Thin typed client over the curation service's HTTP API.  Every method
 * is one documented endpoint call; the fetch implementation is
 * injectable so tests can record and fake the wire.
 */

import type {
  AttentionAid,
  DecisionKind,
  FinalizeResult,
  HistoryView,
  RegisterResult,
  RemInfo,
  RemList,
  RevisionSummary,
  SessionView,
  TimelineExport,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** A non-2xx response; `message` is the service's error envelope text. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const text = await response.text();
    const data: unknown = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const envelope = data as { error?: unknown } | null;
      const message =
        envelope && typeof envelope.error === "string"
          ? envelope.error
          : `request failed with status ${response.status}`;
      throw new ApiError(response.status, message);
    }
    return data as T;
  }

  listRems(): Promise<RemList> {
    return this.request("GET", "/rems");
  }

  remInfo(key: string): Promise<RemInfo> {
    return this.request("GET", `/rems/${encodeURIComponent(key)}`);
  }

  register(uri: string, actor: string): Promise<RegisterResult> {
    return this.request("POST", "/rems", { uri, actor });
  }

  openSession(key: string, actor: string, wait = false): Promise<SessionView> {
    return this.request("POST", `/rems/${encodeURIComponent(key)}/sessions`, { actor, wait });
  }

  session(sessionId: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  attentionAid(sessionId: string, entryId: string): Promise<AttentionAid> {
    return this.request(
      "GET",
      `/sessions/${encodeURIComponent(sessionId)}/attention/${encodeURIComponent(entryId)}`,
    );
  }

  decide(
    sessionId: string,
    entryId: string,
    kind: DecisionKind,
    actor: string,
    newUri?: string,
  ): Promise<SessionView> {
    const body: Record<string, unknown> = { entry_id: entryId, kind, actor };
    if (newUri !== undefined) {
      body.new_uri = newUri;
    }
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/decisions`, body);
  }

  finalize(sessionId: string, actor: string): Promise<FinalizeResult> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/finalize`, { actor });
  }

  history(key: string): Promise<HistoryView> {
    return this.request("GET", `/rems/${encodeURIComponent(key)}/history`);
  }

  rollback(key: string, target: number, actor: string): Promise<RevisionSummary> {
    return this.request("POST", `/rems/${encodeURIComponent(key)}/rollback`, { target, actor });
  }

  timeline(key: string): Promise<TimelineExport> {
    return this.request("GET", `/rems/${encodeURIComponent(key)}/timeline`);
  }
}
