// Pure HTML renderers over the store state. Only fields present in the API
// payload are shown; absent values render as em-dash placeholders, never as
// fabricated content.

import type { StoreState } from "./store.js";
import type { ChangeEvent, CompanySummary, EventStatus } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function formatValue(value: unknown): string {
  if (value === null || value === undefined) return "(none)";
  if (typeof value === "string") return value;
  if (typeof value === "object") {
    const record = value as Record<string, unknown>;
    if (typeof record["name"] === "string") {
      const role = typeof record["role_label"] === "string" ? ` (${record["role_label"]})` : "";
      return `${record["name"]}${role}`;
    }
    return JSON.stringify(value);
  }
  return String(value);
}

const TABS: EventStatus[] = ["pending", "accepted", "rejected"];

export function renderTabs(state: StoreState): string {
  return TABS.map((tab) => {
    const active = tab === state.tab ? " active" : "";
    const count = state.counts[tab];
    return `<button class="tab${active}" data-action="tab" data-tab="${tab}">${tab} (${count})</button>`;
  }).join("");
}

export function renderBanner(state: StoreState): string {
  if (state.banner) {
    return `<div class="banner error">${escapeHtml(state.banner)} <button data-action="retry">Retry</button></div>`;
  }
  if (state.notice) {
    return `<div class="banner notice">${escapeHtml(state.notice)}</div>`;
  }
  return "";
}

export function renderTokenPrompt(state: StoreState): string {
  if (!state.tokenNeeded) return "";
  return `
    <div class="token-prompt">
      <label>Reviewer token: <input type="password" id="token-input" placeholder="Bearer token"></label>
      <button data-action="set-token">Start session</button>
    </div>`;
}

function renderDecisionControls(event: ChangeEvent, state: StoreState): string {
  if (event.status !== "pending") {
    return `<span class="decided">${event.status} by ${escapeHtml(event.decided_by ?? "")} at ${escapeHtml(
      event.decided_at ?? "",
    )}</span>`;
  }
  const armed = state.armed;
  if (armed && armed.eventId === event.event_id) {
    return `
      <span class="confirm">Really ${armed.decision}?</span>
      <button class="danger" data-action="confirm" data-id="${event.event_id}">Confirm ${armed.decision}</button>
      <button data-action="disarm">Cancel</button>`;
  }
  return `
    <button data-action="arm" data-id="${event.event_id}" data-decision="accept">Accept</button>
    <button data-action="arm" data-id="${event.event_id}" data-decision="reject">Reject</button>`;
}

export function renderEventCard(event: ChangeEvent, state: StoreState): string {
  const oldValue = escapeHtml(formatValue(event.old_value));
  const newValue = escapeHtml(formatValue(event.new_value));
  return `
  <article class="card" data-event-id="${event.event_id}" data-status="${event.status}">
    <header>
      <span class="event-id">${event.event_id}</span>
      <span class="field">${escapeHtml(event.field)}</span>
      <button class="link" data-action="entity" data-id="${event.entity_id}">${event.entity_id}</button>
    </header>
    <div class="diff">
      <div class="old"><span class="label">current</span> ${oldValue}</div>
      <div class="new"><span class="label">proposed</span> ${newValue}</div>
    </div>
    <blockquote class="evidence">
      ${escapeHtml(event.excerpt || "(no excerpt)")}
      <cite><a href="${escapeHtml(event.evidence.source_url)}" target="_blank" rel="noopener">source</a></cite>
    </blockquote>
    <footer>${renderDecisionControls(event, state)}</footer>
  </article>`;
}

export function renderEntityPanel(entity: CompanySummary | null): string {
  if (!entity) return "";
  const personnel = entity.personnel
    .map(([pid, role]) => `<li>${escapeHtml(pid)} - ${escapeHtml(role)}</li>`)
    .join("");
  const phones = entity.phones.map((p) => `<li>${escapeHtml(p)}</li>`).join("");
  return `
  <aside class="entity-panel">
    <header>
      <h2>${escapeHtml(entity.canonical_name)}</h2>
      <button data-action="close-entity">Close</button>
    </header>
    <dl>
      <dt>Country</dt><dd>${escapeHtml(entity.country || "(none)")}</dd>
      <dt>Website</dt><dd>${escapeHtml(entity.website ?? "(none)")}</dd>
      <dt>Personnel</dt><dd><ul>${personnel || "<li>(none)</li>"}</ul></dd>
      <dt>Phones</dt><dd><ul>${phones || "<li>(none)</li>"}</ul></dd>
    </dl>
  </aside>`;
}

export function renderQueue(state: StoreState): string {
  const cards = state.events.map((event) => renderEventCard(event, state)).join("\n");
  const more = state.cursor
    ? `<button class="load-more" data-action="load-more">Load more</button>`
    : "";
  const empty = state.events.length === 0 && !state.loading
    ? `<p class="empty">No ${state.tab} events.</p>`
    : "";
  return `${cards}${empty}${more}`;
}

export function renderApp(state: StoreState): string {
  return `
  <div class="app">
    ${renderBanner(state)}
    ${renderTokenPrompt(state)}
    <nav class="tabs">${renderTabs(state)}</nav>
    <main class="queue">${renderQueue(state)}</main>
    ${renderEntityPanel(state.entity)}
  </div>`;
}
