// Bootstrap: start or resume a session, then re-render both panels on every
// store change. The API base defaults to same-origin (the service mounts this
// UI at /ui); override with ?api=http://host:port or localStorage.apiBase.

import { ApiClient } from "./api.js";
import { Actions, renderDesignPanel, renderErrorBanner, renderImagePanel } from "./render.js";
import { Store } from "./state.js";

function apiBase(): string {
  const fromQuery = new URLSearchParams(location.search).get("api");
  if (fromQuery) return fromQuery.replace(/\/$/, "");
  return localStorage.getItem("apiBase")?.replace(/\/$/, "") ?? "";
}

const api = new ApiClient(apiBase());
const store = new Store(api);

const actions: Actions = {
  toggleTag: (tagId) => void store.toggleTag(tagId),
  removeTag: (tagId) => void store.removeTag(tagId),
  addTag: (dimensionId, label) => void store.addTag(dimensionId, label),
  removeDimension: (dimensionId) => void store.removeDimension(dimensionId),
  addDimension: (name) => void store.addDimension(name, []),
  editPrompt: (text) => void store.editPrompt(text),
  submitPrompt: () => void store.submitPrompt(),
  likeImage: (imageId, liked) => void store.likeImage(imageId, liked),
  revealInfo: (imageId) => void store.revealInfo(imageId),
  clearHighlights: () => void store.clearHighlights(),
  setFilter: (filter) => store.setFilter(filter),
  setZoom: (imageId) => store.setZoom(imageId),
  selectFinal: (imageId) => {
    if (confirm("Select this image as the final design? The session locks afterwards.")) {
      void store.selectFinal(imageId);
    }
  },
  requestTagIdeas: (dimensionId) => void suggestTags(dimensionId),
  requestDimensionIdeas: () => void suggestDimensions(),
};

async function suggestTags(dimensionId: string): Promise<void> {
  const { labels } = await api.recommendTags(store.sessionId(), dimensionId);
  if (!labels.length) return;
  const pick = prompt(`Suggested options:\n${labels.join(", ")}\n\nType one to add:`, labels[0]);
  if (pick && pick.trim()) void store.addTag(dimensionId, pick.trim());
}

async function suggestDimensions(): Promise<void> {
  const { names } = await api.recommendDimensions(store.sessionId());
  if (!names.length) return;
  const pick = prompt(`Suggested dimensions:\n${names.join(", ")}\n\nType one to add:`, names[0]);
  if (pick && pick.trim()) void store.addDimension(pick.trim(), []);
}

function render(): void {
  const state = store.current;
  renderErrorBanner(document.getElementById("errors")!, state, () => store.dismissError());
  renderDesignPanel(document.getElementById("design-panel")!, state, actions);
  renderImagePanel(document.getElementById("image-panel")!, state, api, actions);
}

async function start(): Promise<void> {
  store.subscribe(render);
  const params = new URLSearchParams(location.search);
  let sessionId = params.get("session") ?? localStorage.getItem("sessionId");
  if (!sessionId) {
    const condition = params.get("condition") === "baseline" ? "baseline" : "scaffolded";
    const created = await api.createSession({
      documentId: "sample-brief",
      condition,
      providerMode: params.get("provider") ?? "deterministic",
    });
    sessionId = created.id;
    localStorage.setItem("sessionId", sessionId);
  }
  try {
    await store.load(sessionId);
  } catch {
    // stale stored id (service restarted): start a fresh session once
    localStorage.removeItem("sessionId");
    const created = await api.createSession({
      documentId: "sample-brief",
      condition: "scaffolded",
      providerMode: "deterministic",
    });
    localStorage.setItem("sessionId", created.id);
    await store.load(created.id);
  }
}

void start();
