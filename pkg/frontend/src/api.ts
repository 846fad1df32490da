// Typed client for the session HTTP API.

import type {
  ApiErrorBody,
  Critique,
  HumanMark,
  LeaderDecision,
  SessionState,
  SessionSummary,
  Stage,
  UserMetrics,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly detail: string;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.code = body.code;
    this.detail = body.detail;
  }
}

export interface CreateSessionRequest {
  stage: Stage;
  subject: string;
  config?: Record<string, unknown>;
  human_leader?: boolean;
  label?: string;
}

type FetchLike = typeof fetch;

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(base = "", fetchImpl: FetchLike = fetch) {
    this.base = base.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await this.fetchImpl(this.base + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!res.ok) {
      let parsed: ApiErrorBody;
      try {
        parsed = (await res.json()) as ApiErrorBody;
      } catch {
        parsed = { code: "http_error", message: `HTTP ${res.status}`, detail: "" };
      }
      throw new ApiError(res.status, parsed);
    }
    return (await res.json()) as T;
  }

  async createSession(req: CreateSessionRequest): Promise<SessionState> {
    return this.request("POST", "/sessions", req);
  }

  async listSessions(): Promise<SessionSummary[]> {
    const data = await this.request<{ sessions: SessionSummary[] }>("GET", "/sessions");
    return data.sessions;
  }

  /** Returns null when the server replies 304 (no change since `since`). */
  async getState(id: string, since?: number): Promise<SessionState | null> {
    const query = since === undefined ? "" : `?since=${since}`;
    const res = await this.fetchImpl(`${this.base}/sessions/${id}/state${query}`);
    if (res.status === 304) return null;
    if (!res.ok) {
      throw new ApiError(res.status, (await res.json()) as ApiErrorBody);
    }
    return (await res.json()) as SessionState;
  }

  async advance(id: string, expectedVersion?: number): Promise<SessionState> {
    return this.request("POST", `/sessions/${id}/advance`, {
      expected_version: expectedVersion ?? null,
    });
  }

  async submitCritique(
    id: string,
    round: number,
    critique: Critique,
    expectedVersion?: number,
  ): Promise<SessionState> {
    return this.request("POST", `/sessions/${id}/critiques`, {
      round,
      critique,
      expected_version: expectedVersion ?? null,
    });
  }

  async submitLeaderDecision(
    id: string,
    round: number,
    decision: LeaderDecision,
    expectedVersion?: number,
  ): Promise<SessionState> {
    return this.request("POST", `/sessions/${id}/leader-decision`, {
      round,
      decision,
      expected_version: expectedVersion ?? null,
    });
  }

  async markRound(
    id: string,
    mark: Pick<HumanMark, "round" | "edited" | "accepted">,
    expectedVersion?: number,
  ): Promise<SessionState> {
    return this.request("POST", `/sessions/${id}/marks`, {
      ...mark,
      expected_version: expectedVersion ?? null,
    });
  }

  async exportText(id: string): Promise<string> {
    const res = await this.fetchImpl(`${this.base}/sessions/${id}/export`);
    if (!res.ok) {
      throw new ApiError(res.status, (await res.json()) as ApiErrorBody);
    }
    return res.text();
  }

  async metrics(): Promise<UserMetrics> {
    return this.request("GET", "/metrics");
  }
}

export const MIN_POLL_INTERVAL_MS = 1000;

export interface PollerHandle {
  stop(): void;
}

/**
 * Polls a session's state, passing `since` so unchanged states cost a 304.
 * The interval is clamped to at least one second regardless of what the
 * caller asks for.
 */
export function pollSession(
  client: ApiClient,
  id: string,
  onUpdate: (state: SessionState) => void,
  options: {
    intervalMs?: number;
    onError?: (err: unknown) => void;
    setIntervalImpl?: typeof setInterval;
    clearIntervalImpl?: typeof clearInterval;
  } = {},
): PollerHandle {
  const interval = Math.max(options.intervalMs ?? MIN_POLL_INTERVAL_MS, MIN_POLL_INTERVAL_MS);
  const setIntervalImpl = options.setIntervalImpl ?? setInterval;
  const clearIntervalImpl = options.clearIntervalImpl ?? clearInterval;
  let since: number | undefined;
  let inFlight = false;

  const tick = async () => {
    if (inFlight) return; // never stack requests on a slow server
    inFlight = true;
    try {
      const state = await client.getState(id, since);
      if (state !== null) {
        since = state.version;
        onUpdate(state);
      }
    } catch (err) {
      options.onError?.(err);
    } finally {
      inFlight = false;
    }
  };

  void tick();
  const timer = setIntervalImpl(tick, interval);
  return { stop: () => clearIntervalImpl(timer) };
}
