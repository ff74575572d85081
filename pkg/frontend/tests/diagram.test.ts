import { describe, expect, it } from "vitest";

import { buildDiagram } from "../src/diagram.js";
import { applyBookmark, applySession, initialState, selectNode } from "../src/state.js";
import { sessionFixture } from "./fixtures.js";

function sessionState() {
  return applySession(initialState(), sessionFixture());
}

describe("diagram view", () => {
  it("renders node coordinates verbatim from the server layout", () => {
    const state = sessionState();
    const view = buildDiagram(state);
    const byId = new Map(view.nodes.map((n) => [n.nodeId, n]));
    for (const position of sessionFixture().layout) {
      const node = byId.get(position.node_id)!;
      // no client-side layout math: exact payload coordinates
      expect(node.x).toBe(position.x);
      expect(node.y).toBe(position.y);
      expect(node.level).toBe(position.level);
    }
  });

  it("draws one edge per parent-child pair from the same coordinates", () => {
    const view = buildDiagram(sessionState(), 180, 80);
    expect(view.edges).toHaveLength(5);
    for (const edge of view.edges) {
      expect(edge.fromId).toBe("n1");
      expect(edge.x1).toBe(600);
      expect(edge.y1).toBe(80); // root bottom: y + node height
      expect(edge.y2).toBe(140); // child top
    }
  });

  it("marks bookmarked nodes as emphasized", () => {
    let state = sessionState();
    state = applyBookmark(state, { ...state.nodes["n3"]!, bookmarked: true });
    const view = buildDiagram(state);
    const flags = new Map(view.nodes.map((n) => [n.nodeId, n.bookmarked]));
    expect(flags.get("n3")).toBe(true);
    expect(flags.get("n2")).toBe(false);
  });

  it("marks the selected node", () => {
    const view = buildDiagram(selectNode(sessionState(), "n4"));
    expect(view.nodes.find((n) => n.nodeId === "n4")!.selected).toBe(true);
    expect(view.nodes.filter((n) => n.selected)).toHaveLength(1);
  });

  it("1+5 tree has 6 nodes and 5 edges", () => {
    const view = buildDiagram(sessionState());
    expect(view.nodes).toHaveLength(6);
    expect(view.edges).toHaveLength(5);
  });
});
