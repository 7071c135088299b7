// Thin client for the session service. Every user gesture in the UI maps
// 1:1 onto exactly one of these calls.

import type { SessionState } from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; text(): Promise<string> }>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request(path: string, method: string, body?: unknown) {
    const init: Parameters<FetchLike>[1] = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.base + path, init);
    const text = await response.text();
    if (!response.ok) {
      let detail = text;
      try {
        detail = JSON.parse(text).detail ?? text;
      } catch {
        // plain-text error body
      }
      throw new ApiError(response.status, detail);
    }
    return text;
  }

  private async json(path: string, method: string, body?: unknown) {
    return JSON.parse(await this.request(path, method, body));
  }

  createSession(domain: string, teacher: string, seed = 0): Promise<{ id: string }> {
    return this.json("/sessions", "POST", { domain, teacher, seed });
  }

  getState(id: string): Promise<SessionState> {
    return this.json(`/sessions/${id}/state`, "GET");
  }

  setGoal(id: string, text: string): Promise<{ status: string }> {
    return this.json(`/sessions/${id}/goal`, "POST", { text });
  }

  sendFeedback(id: string, text: string): Promise<{ outcome: string }> {
    return this.json(`/sessions/${id}/feedback`, "POST", { text });
  }

  // approve maps to the documented feasible/achieved signal phrasing
  approve(id: string): Promise<{ outcome: string }> {
    return this.sendFeedback(id, "Yes.");
  }

  reject(id: string, explanation: string): Promise<{ outcome: string }> {
    if (!explanation.trim()) {
      return Promise.reject(new Error("rejection requires an explanation"));
    }
    return this.sendFeedback(id, explanation);
  }

  advance(id: string): Promise<{ outcome: string; status: string }> {
    return this.json(`/sessions/${id}/advance`, "POST");
  }

  fetchLog(id: string): Promise<string> {
    return this.request(`/sessions/${id}/log`, "GET");
  }

  bundleUrl(id: string): string {
    return `${this.base}/sessions/${id}/bundle`;
  }
}
