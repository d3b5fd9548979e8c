import { describe, expect, it } from "vitest";

import { renderApp, renderEventCard, escapeHtml } from "../src/render.js";
import { QueueStore } from "../src/store.js";
import { FakeApi, makeEvent } from "./fakeApi.js";

async function loadedStore(count = 3): Promise<QueueStore> {
  const api = new FakeApi(count);
  const store = new QueueStore(api);
  store.enterToken("tok-alice");
  await store.loadTab("pending");
  return store;
}

describe("renderers", () => {
  it("renders every pending event as a card, oldest first", async () => {
    const store = await loadedStore(3);
    const html = renderApp(store.getState());
    const order = [...html.matchAll(/data-event-id="(ev-\d+)"/g)].map((m) => m[1]);
    expect(order).toEqual(["ev-000001", "ev-000002", "ev-000003"]);
  });

  it("card shows only payload fields: diff, excerpt, entity link", () => {
    const event = makeEvent(7);
    const html = renderEventCard(event, new QueueStore(new FakeApi(0)).getState());
    expect(html).toContain("+41442000007");
    expect(html).toContain("(none)"); // old_value null rendered as placeholder
    expect(html).toContain("Call +41442000007");
    expect(html).toContain('data-action="entity" data-id="c-1"');
    expect(html).not.toContain("undefined");
  });

  it("personnel values render with the display name and role", () => {
    const event = makeEvent(1);
    event.field = "personnel.ceo";
    event.old_value = { person_id: "p-1", name: "Alice Keller" };
    event.new_value = { person_id: null, name: "Jane Roe", role_label: "chief executive officer" };
    const html = renderEventCard(event, new QueueStore(new FakeApi(0)).getState());
    expect(html).toContain("Alice Keller");
    expect(html).toContain("Jane Roe (chief executive officer)");
  });

  it("armed card shows the confirmation controls", async () => {
    const store = await loadedStore(1);
    store.arm("ev-000001", "reject");
    const html = renderApp(store.getState());
    expect(html).toContain("Really reject?");
    expect(html).toContain('data-action="confirm"');
    expect(html).toContain('data-action="disarm"');
  });

  it("decided card shows reviewer instead of buttons", () => {
    const event = makeEvent(1, "accepted");
    event.decided_by = "alice";
    event.decided_at = "2025-01-02T00:00:00Z";
    const html = renderEventCard(event, new QueueStore(new FakeApi(0)).getState());
    expect(html).toContain("accepted by alice");
    expect(html).not.toContain('data-action="arm"');
  });

  it("token prompt appears until a token is entered", async () => {
    const api = new FakeApi(1);
    const store = new QueueStore(api);
    expect(renderApp(store.getState())).toContain("token-input");
    store.enterToken("tok-alice");
    await store.loadTab("pending");
    expect(renderApp(store.getState())).not.toContain("token-input");
  });

  it("banner with retry on service failure", async () => {
    const api = new FakeApi(1);
    api.down = true;
    const store = new QueueStore(api);
    store.enterToken("tok-alice");
    await store.loadTab("pending");
    const html = renderApp(store.getState());
    expect(html).toContain("Service unreachable");
    expect(html).toContain('data-action="retry"');
  });

  it("evidence excerpts are escaped verbatim, never interpreted", () => {
    const event = makeEvent(1);
    event.excerpt = '<script>alert("x")</script> & more';
    const html = renderEventCard(event, new QueueStore(new FakeApi(0)).getState());
    expect(html).not.toContain("<script>alert");
    expect(html).toContain("&lt;script&gt;");
    expect(escapeHtml("a&b")).toBe("a&amp;b");
  });
});
