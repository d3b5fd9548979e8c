// Review-queue state controller. All state is derived from API responses:
// nothing is guessed optimistically, so a refresh always reconstructs the
// same view, and concurrent reviewers converge on the service's truth.

import { ApiError, ServiceUnreachable, type ReviewApi } from "./api.js";
import type { ChangeEvent, CompanySummary, Decision, EventStatus } from "./types.js";

export interface ArmedAction {
  eventId: string;
  decision: Decision;
}

export interface StoreState {
  tab: EventStatus;
  events: ChangeEvent[];
  cursor: string | null;
  counts: Record<EventStatus, number>;
  banner: string | null;
  notice: string | null;
  tokenNeeded: boolean;
  armed: ArmedAction | null;
  entity: CompanySummary | null;
  loading: boolean;
}

const EMPTY_COUNTS: Record<EventStatus, number> = { pending: 0, accepted: 0, rejected: 0 };

export type Listener = (state: StoreState) => void;

export class QueueStore {
  private state: StoreState = {
    tab: "pending",
    events: [],
    cursor: null,
    counts: { ...EMPTY_COUNTS },
    banner: null,
    notice: null,
    tokenNeeded: true,
    armed: null,
    entity: null,
    loading: false,
  };
  private listeners: Listener[] = [];

  constructor(
    private readonly api: ReviewApi,
    private readonly pageSize = 25,
  ) {}

  getState(): StoreState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private update(patch: Partial<StoreState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  enterToken(token: string): void {
    this.api.setToken(token.trim());
    this.update({ tokenNeeded: false, banner: null });
  }

  async loadTab(tab: EventStatus): Promise<void> {
    this.update({ tab, events: [], cursor: null, armed: null, loading: true });
    await this.fetchPage(null);
  }

  async loadMore(): Promise<void> {
    if (this.state.cursor === null) return;
    await this.fetchPage(this.state.cursor);
  }

  async refresh(): Promise<void> {
    await this.loadTab(this.state.tab);
  }

  private async fetchPage(cursor: string | null): Promise<void> {
    try {
      const page = await this.api.listChanges(this.state.tab, cursor, this.pageSize);
      this.update({
        events: cursor === null ? page.events : [...this.state.events, ...page.events],
        cursor: page.cursor,
        counts: page.counts,
        banner: null,
        loading: false,
      });
    } catch (err) {
      this.handleError(err);
    }
  }

  // destructive actions are two-step: arm() shows the confirmation,
  // confirm() performs it; anything else disarms
  arm(eventId: string, decision: Decision): void {
    this.update({ armed: { eventId, decision }, notice: null });
  }

  disarm(): void {
    this.update({ armed: null });
  }

  async confirm(): Promise<void> {
    const armed = this.state.armed;
    if (!armed) return;
    await this.decide(armed.eventId, armed.decision);
  }

  async decide(eventId: string, decision: Decision): Promise<void> {
    try {
      const decided = await this.api.decide(eventId, decision);
      this.applyDecided(decided);
    } catch (err) {
      if (err instanceof ApiError && err.status === 401) {
        this.update({ tokenNeeded: true, armed: null, banner: "Reviewer token required." });
        return;
      }
      if (err instanceof ApiError && err.status === 404) {
        this.update({
          events: this.state.events.filter((e) => e.event_id !== eventId),
          armed: null,
          notice: `Event ${eventId} no longer exists; it was removed from the queue.`,
        });
        return;
      }
      this.handleError(err);
    }
  }

  // the card reflects the event the service returned, never a local guess;
  // events that stop matching the tab filter drop out without a full reload
  private applyDecided(decided: ChangeEvent): void {
    const previous = this.state.events.find((e) => e.event_id === decided.event_id);
    const counts = { ...this.state.counts };
    if (previous && previous.status !== decided.status) {
      counts[previous.status] = Math.max(0, counts[previous.status] - 1);
      counts[decided.status] += 1;
    }
    const events =
      decided.status === this.state.tab
        ? this.state.events.map((e) => (e.event_id === decided.event_id ? decided : e))
        : this.state.events.filter((e) => e.event_id !== decided.event_id);
    this.update({
      events,
      counts,
      armed: null,
      notice: `Event ${decided.event_id} ${decided.status} by ${decided.decided_by ?? "unknown"}.`,
    });
  }

  async showEntity(entityId: string): Promise<void> {
    try {
      const entity = await this.api.getEntity(entityId);
      this.update({ entity, banner: null });
    } catch (err) {
      this.handleError(err);
    }
  }

  closeEntity(): void {
    this.update({ entity: null });
  }

  private handleError(err: unknown): void {
    if (err instanceof ServiceUnreachable) {
      this.update({ banner: "Service unreachable. Check the API and retry.", loading: false, armed: null });
      return;
    }
    if (err instanceof ApiError) {
      this.update({ banner: `Request failed (${err.status}): ${err.message}`, loading: false, armed: null });
      return;
    }
    throw err;
  }
}
