// Thin typed client over the curation-service endpoints. The token lives in
// memory only; it is entered at session start and never persisted.

import type { ChangeEvent, CompanySummary, Decision, EventStatus, QueueResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ServiceUnreachable extends Error {}

export interface ReviewApi {
  listChanges(status: EventStatus, cursor?: string | null, limit?: number): Promise<QueueResponse>;
  decide(eventId: string, decision: Decision): Promise<ChangeEvent>;
  getEntity(entityId: string): Promise<CompanySummary>;
  setToken(token: string): void;
  hasToken(): boolean;
}

export class HttpReviewApi implements ReviewApi {
  private token: string | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  setToken(token: string): void {
    this.token = token;
  }

  hasToken(): boolean {
    return this.token !== null;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ServiceUnreachable(String(err));
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  async listChanges(status: EventStatus, cursor?: string | null, limit = 50): Promise<QueueResponse> {
    const params = new URLSearchParams({ status, limit: String(limit) });
    if (cursor) params.set("cursor", cursor);
    const response = await this.request(`/changes?${params}`);
    return (await response.json()) as QueueResponse;
  }

  async decide(eventId: string, decision: Decision): Promise<ChangeEvent> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.request(`/changes/${eventId}/decision`, {
      method: "POST",
      headers,
      body: JSON.stringify({ decision }),
    });
    return (await response.json()) as ChangeEvent;
  }

  async getEntity(entityId: string): Promise<CompanySummary> {
    const response = await this.request(`/entities/${entityId}`);
    return (await response.json()) as CompanySummary;
  }
}
