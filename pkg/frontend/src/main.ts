/** Page bootstrap: upload form, API client, controller, render loop. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";
import {
  Handlers,
  renderBookmarkPanel,
  renderDiagram,
  renderError,
  renderSidebar,
} from "./dom.js";
import type { ViewState } from "./state.js";

function requireElement(id: string): HTMLElement {
  const element = document.getElementById(id);
  if (element === null) throw new Error(`missing #${id}`);
  return element;
}

export function boot(): void {
  const apiBase =
    new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8040";
  const client = new ApiClient(apiBase);

  const diagramHost = requireElement("diagram");
  const sidebarHost = requireElement("sidebar");
  const bookmarksHost = requireElement("bookmarks");
  const errorHost = requireElement("error-banner");
  const form = requireElement("session-form") as HTMLFormElement;
  const fileInput = requireElement("dataset-input") as HTMLInputElement;
  const intentInput = requireElement("intent-input") as HTMLInputElement;

  const handlers: Handlers = {
    onNodeClick: (id) => void app.clickNode(id),
    onBranch: (id, userInput) => void app.branch(id, userInput),
    onRegenerate: (id) => void app.regenerate(id),
    onToggleBookmark: (id) => void app.toggleBookmark(id),
    onExpandChart: (id) => void app.expandChart(id),
    onCollapseChart: (id) => void app.collapseChart(id),
  };

  const render = (state: ViewState): void => {
    renderDiagram(diagramHost, state, handlers);
    renderSidebar(sidebarHost, state, handlers);
    renderBookmarkPanel(bookmarksHost, state, handlers);
    renderError(errorHost, state);
  };

  const app = new App(client, render);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const file = fileInput.files?.[0];
    const intent = intentInput.value.trim();
    if (!file || !intent) return;
    void app.createSession(file, file.name, intent);
  });
}

if (typeof document !== "undefined" && document.getElementById("diagram") !== null) {
  boot();
}
