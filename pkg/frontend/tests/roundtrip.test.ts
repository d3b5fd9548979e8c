// Round trip against the real curation service: spawns the Python API with a
// fixture event queue and drives it through the HTTP client and store.

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { HttpReviewApi } from "../src/api.js";
import { renderApp } from "../src/render.js";
import { QueueStore } from "../src/store.js";

const PORT = 8800 + Math.floor(Math.random() * 100);
const BASE = `http://127.0.0.1:${PORT}`;

const SERVICE_SCRIPT = `
import uvicorn
from trialkb.extract.slots import SlotAssignment, SlotRole
from trialkb.fuse import EventStore, propose_changes
from trialkb.kb import CompanyEntity, KnowledgeBase
from trialkb.service.app import create_app

kb = KnowledgeBase()
kb.upsert(CompanyEntity(id="c-1", canonical_name="Novagenix AG", country="CH"))
events = EventStore()
slots = [
    SlotAssignment(
        subject="c-1", role=SlotRole.IS_PHONE_NUMBER_OF,
        object=f"+414420{i:05d}", confidence=0.9,
        evidence_url="https://e.com/contact", evidence_span=(0, 12),
        evidence_excerpt=f"Call +414420{i:05d}",
    )
    for i in range(120)
]
propose_changes(slots, kb, events)
app = create_app(kb, events, {"tok-alice": "alice"})
uvicorn.run(app, host="127.0.0.1", port=${PORT}, log_level="error")
`;

let service: ChildProcess;

async function waitForHealth(): Promise<void> {
  for (let attempt = 0; attempt < 60; attempt++) {
    try {
      const response = await fetch(`${BASE}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("curation service did not come up");
}

beforeAll(async () => {
  service = spawn("python3", ["-c", SERVICE_SCRIPT], { stdio: "ignore" });
  await waitForHealth();
}, 30_000);

afterAll(() => {
  service.kill();
});

describe("UI round trip against the running service", () => {
  it("queue mirrors the full pending fixture across pages", async () => {
    const api = new HttpReviewApi(BASE);
    api.setToken("tok-alice");
    const store = new QueueStore(api, 50);
    store.enterToken("tok-alice");
    await store.loadTab("pending");
    while (store.getState().cursor !== null) {
      await store.loadMore();
    }
    const state = store.getState();
    expect(state.events.length).toBe(120);
    expect(state.counts.pending).toBe(120);

    // union of UI pages equals the API result set fetched directly
    const direct = await api.listChanges("pending", null, 500);
    expect(state.events.map((e) => e.event_id)).toEqual(direct.events.map((e) => e.event_id));

    const html = renderApp(state);
    for (const event of direct.events) {
      expect(html).toContain(`data-event-id="${event.event_id}"`);
    }
  }, 20_000);

  it("accepting updates the pending tab and the entity's KB value", async () => {
    const api = new HttpReviewApi(BASE);
    const store = new QueueStore(api, 50);
    store.enterToken("tok-alice");
    await store.loadTab("pending");
    const target = store.getState().events[0]!;

    store.arm(target.event_id, "accept");
    await store.confirm();

    const state = store.getState();
    expect(state.events.find((e) => e.event_id === target.event_id)).toBeUndefined();
    expect(state.counts.accepted).toBeGreaterThanOrEqual(1);

    const entity = await api.getEntity("c-1");
    expect(entity.phones).toContain(target.new_value);
  }, 20_000);

  it("double-clicking accept produces no second state change", async () => {
    const api = new HttpReviewApi(BASE);
    const store = new QueueStore(api, 50);
    store.enterToken("tok-alice");
    await store.loadTab("pending");
    const target = store.getState().events[0]!;

    const first = await api.decide(target.event_id, "accept");
    const second = await api.decide(target.event_id, "accept");
    expect(second).toEqual(first); // identical body, same decided_at

    const entity = await api.getEntity("c-1");
    const occurrences = entity.phones.filter((p) => p === target.new_value).length;
    expect(occurrences).toBe(1);

    // and through the store path as a user would double-click
    store.arm(target.event_id, "accept");
    await store.confirm();
    expect(store.getState().counts.pending).toBe(118);
  }, 20_000);

  it("bad token is surfaced as a token prompt, not a crash", async () => {
    const api = new HttpReviewApi(BASE);
    const store = new QueueStore(api, 50);
    store.enterToken("wrong-token");
    await store.loadTab("pending");
    const target = store.getState().events[0]!;
    store.arm(target.event_id, "accept");
    await store.confirm();
    expect(store.getState().tokenNeeded).toBe(true);
  }, 20_000);
});
