// Bootstrap: wire the store to the document with one delegated click handler.

import { HttpReviewApi } from "./api.js";
import { renderApp } from "./render.js";
import { QueueStore } from "./store.js";
import type { Decision, EventStatus } from "./types.js";

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "http://127.0.0.1:8080";

const api = new HttpReviewApi(apiBase);
const store = new QueueStore(api);
const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

store.subscribe((state) => {
  root.innerHTML = renderApp(state);
});

root.addEventListener("click", (raw) => {
  const target = (raw.target as HTMLElement).closest("[data-action]");
  if (!(target instanceof HTMLElement)) return;
  const action = target.dataset["action"];
  switch (action) {
    case "tab":
      void store.loadTab(target.dataset["tab"] as EventStatus);
      break;
    case "retry":
      void store.refresh();
      break;
    case "set-token": {
      const input = document.getElementById("token-input") as HTMLInputElement | null;
      if (input && input.value.trim()) {
        store.enterToken(input.value);
        void store.refresh();
      }
      break;
    }
    case "arm":
      store.arm(target.dataset["id"]!, target.dataset["decision"] as Decision);
      break;
    case "confirm":
      void store.confirm();
      break;
    case "disarm":
      store.disarm();
      break;
    case "load-more":
      void store.loadMore();
      break;
    case "entity":
      void store.showEntity(target.dataset["id"]!);
      break;
    case "close-entity":
      store.closeEntity();
      break;
  }
});

void store.loadTab("pending");
