// @vitest-environment happy-dom
import { beforeEach, describe, expect, it, vi } from "vitest";

import { Handlers, renderBookmarkPanel, renderDiagram, renderSidebar } from "../src/dom.js";
import {
  applyBookmark,
  applyGrowth,
  applyHints,
  applySession,
  initialState,
  selectNode,
} from "../src/state.js";
import { branchFixture, hintsFixture, sessionFixture } from "./fixtures.js";

function handlers(): Handlers {
  return {
    onNodeClick: vi.fn(),
    onBranch: vi.fn(),
    onRegenerate: vi.fn(),
    onToggleBookmark: vi.fn(),
    onExpandChart: vi.fn(),
    onCollapseChart: vi.fn(),
  };
}

function sessionState() {
  return applySession(initialState(), sessionFixture());
}

describe("DOM rendering", () => {
  let host: HTMLElement;

  beforeEach(() => {
    host = document.createElement("div");
    document.body.appendChild(host);
  });

  it("renders every node at its server coordinates", () => {
    renderDiagram(host, sessionState(), handlers());
    const groups = host.querySelectorAll("g.node");
    expect(groups).toHaveLength(6);
    const transforms = new Map(
      [...groups].map((g) => [g.getAttribute("data-node-id"), g.getAttribute("transform")]),
    );
    for (const position of sessionFixture().layout) {
      expect(transforms.get(position.node_id)).toBe(
        `translate(${position.x},${position.y})`,
      );
    }
    expect(host.querySelectorAll("line.edge")).toHaveLength(5);
  });

  it("clicking a node group invokes the click handler", () => {
    const h = handlers();
    renderDiagram(host, sessionState(), h);
    const node = host.querySelector('g[data-node-id="n3"]')!;
    node.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(h.onNodeClick).toHaveBeenCalledWith("n3");
  });

  it("bookmarked nodes carry the emphasized style class", () => {
    let state = sessionState();
    state = applyBookmark(state, { ...state.nodes["n5"]!, bookmarked: true });
    renderDiagram(host, state, handlers());
    expect(host.querySelector('g[data-node-id="n5"]')!.getAttribute("class")).toContain(
      "bookmarked",
    );
    expect(host.querySelector('g[data-node-id="n2"]')!.getAttribute("class")).not.toContain(
      "bookmarked",
    );
  });

  it("sidebar shows hypothesis, chart controls and snippets for the selection", () => {
    let state = selectNode(sessionState(), "n2");
    state = applyHints(state, "n2", hintsFixture());
    renderSidebar(host, state, handlers());
    expect(host.querySelector(".sidebar-title")!.textContent).toBe("Hypothesis 2");
    expect(host.querySelector(".hypothesis")!.textContent).toContain("There is a pattern 2.");
    expect(host.querySelector("button.expand-chart")).not.toBeNull();
    expect(host.querySelectorAll(".snippet")).toHaveLength(1);
  });

  it("branch button passes the steering input to the handler", () => {
    const h = handlers();
    let state = selectNode(sessionState(), "n2");
    state = applyHints(state, "n2", hintsFixture());
    renderSidebar(host, state, h);
    const input = host.querySelector("input.steer-input") as HTMLInputElement;
    input.value = "University prestige comes from previous wealth";
    (host.querySelector("button.branch") as HTMLButtonElement).click();
    expect(h.onBranch).toHaveBeenCalledWith(
      "n2",
      "University prestige comes from previous wealth",
    );
  });

  it("branch controls are disabled while a generation is pending", () => {
    let state = selectNode(sessionState(), "n2");
    state = { ...state, pendingGeneration: true };
    renderSidebar(host, state, handlers());
    expect((host.querySelector("button.branch") as HTMLButtonElement).disabled).toBe(true);
  });

  it("expanded chart renders marks and a collapse control", () => {
    const h = handlers();
    let state = selectNode(sessionState(), "n2");
    state = applyHints(state, "n2", hintsFixture());
    state = { ...state, sidebar: { ...state.sidebar, chartExpanded: true } };
    renderSidebar(host, state, h);
    expect(host.querySelectorAll("svg.chart rect.mark-bar")).toHaveLength(3);
    (host.querySelector("button.collapse-chart") as HTMLButtonElement).click();
    expect(h.onCollapseChart).toHaveBeenCalledWith("n2");
  });

  it("bookmark panel lists bookmarked nodes with their level", () => {
    let state = applyGrowth(sessionState(), branchFixture());
    state = applyBookmark(state, { ...state.nodes["n8"]!, bookmarked: true });
    renderBookmarkPanel(host, state, handlers());
    const entries = host.querySelectorAll(".bookmark-entry");
    expect(entries).toHaveLength(1);
    expect(entries[0]!.textContent).toContain("Deeper 8");
    expect(entries[0]!.textContent).toContain("level 2");
  });
});
