import { describe, expect, it } from "vitest";

import {
  applyBookmark,
  applyGrowth,
  applyHints,
  applySession,
  bookmarkPanel,
  initialState,
  selectNode,
  setChartExpanded,
} from "../src/state.js";
import { branchFixture, hintsFixture, makeNode, sessionFixture } from "./fixtures.js";

function sessionState() {
  return applySession(initialState(), sessionFixture());
}

describe("state reducers", () => {
  it("applySession indexes nodes and positions", () => {
    const state = sessionState();
    expect(state.sessionId).toBe("s-fixture");
    expect(Object.keys(state.nodes)).toHaveLength(6);
    expect(state.positions["n4"]).toEqual({ node_id: "n4", x: 600, y: 140, level: 1 });
    expect(state.selectedNode).toBeNull();
  });

  it("applyGrowth merges new nodes and keeps everything in the new layout", () => {
    const state = applyGrowth(sessionState(), branchFixture());
    expect(Object.keys(state.nodes)).toHaveLength(9);
    expect(state.nodes["n7"]!.userInput).toBe("steer");
    expect(state.positions["n7"]!.x).toBe(90);
  });

  it("applyGrowth prunes nodes missing from the fresh layout", () => {
    let state = applyGrowth(sessionState(), branchFixture());
    state = selectNode(state, "n8");
    // regeneration of n2 removes n7..n9 and adds n10..n12
    const regrowth = {
      new_nodes: [10, 11, 12].map((i) =>
        makeNode({
          node_id: `n${i}`,
          parent_id: "n2",
          level: 2,
          title: `Fresh ${i}`,
          sibling_index: i - 10,
        }),
      ),
      layout: [
        ...sessionFixture().layout,
        { node_id: "n10", x: 90, y: 280, level: 2 },
        { node_id: "n11", x: 290, y: 280, level: 2 },
        { node_id: "n12", x: 490, y: 280, level: 2 },
      ],
      removed_count: 3,
    };
    state = applyGrowth(state, regrowth);
    expect(state.nodes["n7"]).toBeUndefined();
    expect(state.nodes["n10"]).toBeDefined();
    // the selected node was regenerated away: selection is cleared
    expect(state.selectedNode).toBeNull();
  });

  it("selection requires an existing node", () => {
    const state = selectNode(sessionState(), "ghost");
    expect(state.selectedNode).toBeNull();
  });

  it("selecting a node resets chart expansion", () => {
    let state = selectNode(sessionState(), "n2");
    state = setChartExpanded(state, true);
    state = selectNode(state, "n3");
    expect(state.sidebar.chartExpanded).toBe(false);
  });

  it("bookmark panel mirrors server flags and orders by level then sibling", () => {
    let state = applyGrowth(sessionState(), branchFixture());
    state = applyBookmark(state, { ...state.nodes["n8"]!, bookmarked: true });
    state = applyBookmark(state, { ...state.nodes["n3"]!, bookmarked: true });
    const panel = bookmarkPanel(state);
    expect(panel.map((n) => n.node_id)).toEqual(["n3", "n8"]);
    state = applyBookmark(state, { ...state.nodes["n3"]!, bookmarked: false });
    expect(bookmarkPanel(state).map((n) => n.node_id)).toEqual(["n8"]);
  });

  it("hints are cached per node and survive unrelated updates", () => {
    let state = selectNode(sessionState(), "n2");
    state = applyHints(state, "n2", hintsFixture());
    state = selectNode(state, "n3");
    expect(state.hints["n2"]!.chart).not.toBeNull();
  });
});
