/** View state and the reducers that apply server responses to it.
 *
 * The UI is not optimistic: every mutation below takes the server's response
 * as the source of truth. After a branch/regeneration the fresh layout lists
 * exactly the live nodes, so anything missing from it is pruned.
 */

import type {
  BranchOut,
  HintsOut,
  NodeOut,
  PositionOut,
  SessionOut,
  SummaryOut,
} from "./types.js";

export interface SidebarState {
  chartExpanded: boolean;
  textVisible: boolean;
}

export interface ViewState {
  sessionId: string | null;
  rootId: string | null;
  nodes: Record<string, NodeOut>;
  positions: Record<string, PositionOut>;
  summary: SummaryOut | null;
  selectedNode: string | null;
  sidebar: SidebarState;
  hints: Record<string, HintsOut>;
  pendingGeneration: boolean;
  lastError: string | null;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    rootId: null,
    nodes: {},
    positions: {},
    summary: null,
    selectedNode: null,
    sidebar: { chartExpanded: false, textVisible: true },
    hints: {},
    pendingGeneration: false,
    lastError: null,
  };
}

function indexPositions(layout: PositionOut[]): Record<string, PositionOut> {
  const positions: Record<string, PositionOut> = {};
  for (const p of layout) positions[p.node_id] = p;
  return positions;
}

export function applySession(state: ViewState, response: SessionOut): ViewState {
  const nodes: Record<string, NodeOut> = {};
  for (const node of response.tree.nodes) nodes[node.node_id] = node;
  return {
    ...initialState(),
    sessionId: response.session_id,
    rootId: response.tree.root_id,
    nodes,
    positions: indexPositions(response.layout),
    summary: response.summary,
  };
}

/** Branch and regenerate responses share a shape: new nodes + full relayout. */
export function applyGrowth(state: ViewState, response: BranchOut): ViewState {
  const positions = indexPositions(response.layout);
  const nodes: Record<string, NodeOut> = {};
  for (const [id, node] of Object.entries(state.nodes)) {
    if (positions[id] !== undefined) nodes[id] = node;
  }
  for (const node of response.new_nodes) nodes[node.node_id] = node;
  const selectedNode =
    state.selectedNode !== null && nodes[state.selectedNode] !== undefined
      ? state.selectedNode
      : null;
  const hints: Record<string, HintsOut> = {};
  for (const [id, h] of Object.entries(state.hints)) {
    if (nodes[id] !== undefined) hints[id] = h;
  }
  return { ...state, nodes, positions, selectedNode, hints };
}

export function applyBookmark(state: ViewState, node: NodeOut): ViewState {
  return { ...state, nodes: { ...state.nodes, [node.node_id]: node } };
}

export function selectNode(state: ViewState, nodeId: string): ViewState {
  if (state.nodes[nodeId] === undefined) return state;
  return {
    ...state,
    selectedNode: nodeId,
    sidebar: { ...state.sidebar, chartExpanded: false },
  };
}

export function applyHints(state: ViewState, nodeId: string, hints: HintsOut): ViewState {
  return { ...state, hints: { ...state.hints, [nodeId]: hints } };
}

export function setChartExpanded(state: ViewState, expanded: boolean): ViewState {
  return { ...state, sidebar: { ...state.sidebar, chartExpanded: expanded } };
}

export function setPendingGeneration(state: ViewState, pending: boolean): ViewState {
  return { ...state, pendingGeneration: pending };
}

export function setError(state: ViewState, message: string | null): ViewState {
  return { ...state, lastError: message };
}

/** Bookmarked nodes ordered by (level, sibling_index) — the hypothesis panel. */
export function bookmarkPanel(state: ViewState): NodeOut[] {
  return Object.values(state.nodes)
    .filter((n) => n.bookmarked)
    .sort((a, b) => a.level - b.level || a.sibling_index - b.sibling_index);
}
