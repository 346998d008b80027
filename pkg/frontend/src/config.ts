/**
 * Client configuration: the service base URL, how often to poll an
 * unresolved session, and the search-engine URL templates behind the
 * pre-built query links.  Queries open externally; nothing is scraped.
 */

import type { FetchLike } from "./api.js";

export interface EngineLink {
  name: string;
  /** Full URL with `{query}` where the encoded query belongs. */
  template: string;
}

export interface UiConfig {
  service: string;
  pollIntervalMs: number;
  engines: EngineLink[];
}

export const DEFAULT_CONFIG: UiConfig = {
  service: "http://127.0.0.1:8402",
  pollIntervalMs: 1500,
  engines: [
    { name: "Google", template: "https://www.google.com/search?q={query}" },
    { name: "Bing", template: "https://www.bing.com/search?q={query}" },
  ],
};

/** Reads config.json beside index.html; any missing key keeps its default. */
export async function loadConfig(fetchImpl: FetchLike): Promise<UiConfig> {
  try {
    const response = await fetchImpl("./config.json");
    if (!response.ok) {
      return DEFAULT_CONFIG;
    }
    const data = (await response.json()) as Partial<UiConfig>;
    return { ...DEFAULT_CONFIG, ...data };
  } catch {
    return DEFAULT_CONFIG;
  }
}

export function engineUrl(engine: EngineLink, query: string): string {
  return engine.template.replace("{query}", encodeURIComponent(query));
}
