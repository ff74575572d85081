/** View models for the node-link diagram.
 *
 * The server owns the layout: node coordinates are consumed verbatim from
 * the positions payload. The only geometry done here is connecting the
 * endpoints of parent-child edges (parent bottom-center to child top-center)
 * using those same coordinates.
 */

import type { ViewState } from "./state.js";

export const NODE_WIDTH = 180;
export const NODE_HEIGHT = 80;

export interface NodeView {
  nodeId: string;
  x: number;
  y: number;
  level: number;
  title: string;
  bookmarked: boolean;
  selected: boolean;
  isRoot: boolean;
}

export interface EdgeView {
  fromId: string;
  toId: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface DiagramView {
  nodes: NodeView[];
  edges: EdgeView[];
  width: number;
  height: number;
}

export function buildDiagram(
  state: ViewState,
  nodeWidth: number = NODE_WIDTH,
  nodeHeight: number = NODE_HEIGHT,
): DiagramView {
  const nodes: NodeView[] = [];
  const edges: EdgeView[] = [];
  let width = 0;
  let height = 0;

  for (const node of Object.values(state.nodes)) {
    const position = state.positions[node.node_id];
    if (position === undefined) continue;
    nodes.push({
      nodeId: node.node_id,
      x: position.x,
      y: position.y,
      level: position.level,
      title: node.title,
      bookmarked: node.bookmarked,
      selected: state.selectedNode === node.node_id,
      isRoot: node.parent_id === null,
    });
    width = Math.max(width, position.x + nodeWidth / 2);
    height = Math.max(height, position.y + nodeHeight);

    if (node.parent_id !== null) {
      const parent = state.positions[node.parent_id];
      if (parent !== undefined) {
        edges.push({
          fromId: node.parent_id,
          toId: node.node_id,
          x1: parent.x,
          y1: parent.y + nodeHeight,
          x2: position.x,
          y2: position.y,
        });
      }
    }
  }
  nodes.sort((a, b) => a.level - b.level || a.x - b.x);
  edges.sort((a, b) => (a.toId < b.toId ? -1 : 1));
  return { nodes, edges, width, height };
}
