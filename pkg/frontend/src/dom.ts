/** DOM adapter: renders view models into the page.
 *
 * No geometry happens here beyond pan/zoom transforms — node positions come
 * straight from the diagram view models, which carry the server layout.
 */

import { buildChart } from "./chart.js";
import { NODE_HEIGHT, NODE_WIDTH, buildDiagram } from "./diagram.js";
import { ViewState, bookmarkPanel } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Handlers {
  onNodeClick: (nodeId: string) => void;
  onBranch: (nodeId: string, userInput: string | undefined) => void;
  onRegenerate: (nodeId: string) => void;
  onToggleBookmark: (nodeId: string) => void;
  onExpandChart: (nodeId: string) => void;
  onCollapseChart: (nodeId: string) => void;
}

function svgElement(tag: string, attrs: Record<string, string>): SVGElement {
  const element = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) element.setAttribute(key, value);
  return element;
}

function htmlElement(tag: string, className = "", text = ""): HTMLElement {
  const element = document.createElement(tag);
  if (className) element.className = className;
  if (text) element.textContent = text;
  return element;
}

export function renderDiagram(
  container: HTMLElement,
  state: ViewState,
  handlers: Handlers,
): void {
  container.textContent = "";
  const view = buildDiagram(state);
  const svg = svgElement("svg", {
    width: String(Math.max(view.width + NODE_WIDTH / 2, 400)),
    height: String(Math.max(view.height + 20, 200)),
    class: "diagram",
  });

  for (const edge of view.edges) {
    svg.appendChild(
      svgElement("line", {
        x1: String(edge.x1),
        y1: String(edge.y1),
        x2: String(edge.x2),
        y2: String(edge.y2),
        class: "edge",
      }),
    );
  }

  for (const node of view.nodes) {
    const classes = ["node"];
    if (node.bookmarked) classes.push("bookmarked");
    if (node.selected) classes.push("selected");
    if (node.isRoot) classes.push("root");
    const group = svgElement("g", {
      class: classes.join(" "),
      transform: `translate(${node.x},${node.y})`,
      "data-node-id": node.nodeId,
    });
    group.appendChild(
      svgElement("rect", {
        x: String(-NODE_WIDTH / 2),
        y: "0",
        width: String(NODE_WIDTH),
        height: String(NODE_HEIGHT),
        rx: "8",
      }),
    );
    const label = svgElement("text", {
      x: "0",
      y: String(NODE_HEIGHT / 2),
      "text-anchor": "middle",
      "dominant-baseline": "middle",
    });
    label.textContent = node.title;
    group.appendChild(label);
    group.addEventListener("click", () => handlers.onNodeClick(node.nodeId));
    svg.appendChild(group);
  }
  container.appendChild(svg);
}

export function renderSidebar(
  container: HTMLElement,
  state: ViewState,
  handlers: Handlers,
): void {
  container.textContent = "";
  const nodeId = state.selectedNode;
  if (nodeId === null) {
    container.appendChild(
      htmlElement("p", "placeholder", "Click a hypothesis to see its hints."),
    );
    return;
  }
  const node = state.nodes[nodeId];
  if (node === undefined) return;

  container.appendChild(htmlElement("h2", "sidebar-title", node.title || "Intent"));
  if (node.hypothesis) {
    container.appendChild(htmlElement("p", "hypothesis", node.hypothesis));
  }
  if (node.rationale) {
    container.appendChild(htmlElement("p", "rationale", node.rationale));
  }
  if (node.relatedWork) {
    container.appendChild(htmlElement("p", "related-work", node.relatedWork));
  }

  if (node.parent_id !== null) {
    const controls = htmlElement("div", "controls");
    const input = htmlElement("input", "steer-input") as HTMLInputElement;
    input.placeholder = "Optional: steer the next branch";
    const branchButton = htmlElement("button", "branch", "Branch (3)") as HTMLButtonElement;
    branchButton.disabled = state.pendingGeneration;
    branchButton.addEventListener("click", () =>
      handlers.onBranch(nodeId, input.value.trim() || undefined),
    );
    const regenButton = htmlElement(
      "button",
      "regenerate",
      "Regenerate branch",
    ) as HTMLButtonElement;
    regenButton.disabled = state.pendingGeneration;
    regenButton.addEventListener("click", () => handlers.onRegenerate(nodeId));
    const bookmarkButton = htmlElement(
      "button",
      "bookmark",
      node.bookmarked ? "Remove bookmark" : "Bookmark",
    );
    bookmarkButton.addEventListener("click", () => handlers.onToggleBookmark(nodeId));
    controls.append(input, branchButton, regenButton, bookmarkButton);
    container.appendChild(controls);
  }

  const hints = state.hints[nodeId];
  if (hints === undefined) return;

  for (const warning of hints.warnings) {
    container.appendChild(htmlElement("p", "warning", warning));
  }

  if (hints.chart !== null) {
    const chartPanel = htmlElement("div", "chart-panel");
    chartPanel.appendChild(htmlElement("h3", "", "Visual hypothesis"));
    if (state.sidebar.chartExpanded) {
      const view = buildChart(hints.chart);
      const svg = svgElement("svg", { width: "360", height: "200", class: "chart" });
      for (const mark of view.marks) {
        if (mark.kind === "bar") {
          svg.appendChild(
            svgElement("rect", {
              x: String(mark.x),
              y: String(mark.y),
              width: String(mark.width),
              height: String(mark.height),
              class: "mark-bar",
            }),
          );
        } else if (mark.kind === "point") {
          svg.appendChild(
            svgElement("circle", {
              cx: String(mark.cx),
              cy: String(mark.cy),
              r: "3",
              class: "mark-point",
            }),
          );
        } else {
          svg.appendChild(
            svgElement("polyline", { points: mark.points, class: "mark-line" }),
          );
        }
      }
      chartPanel.appendChild(svg);
      chartPanel.appendChild(
        htmlElement("p", "caption", `${view.caption} (${view.rowBasis} rows)`),
      );
      const collapse = htmlElement("button", "collapse-chart", "Collapse chart");
      collapse.addEventListener("click", () => handlers.onCollapseChart(nodeId));
      chartPanel.appendChild(collapse);
    } else {
      const expand = htmlElement("button", "expand-chart", "Expand chart");
      expand.addEventListener("click", () => handlers.onExpandChart(nodeId));
      chartPanel.appendChild(expand);
    }
    container.appendChild(chartPanel);
  }

  if (hints.text !== null && hints.text.snippets.length > 0) {
    const textPanel = htmlElement("div", "text-panel");
    textPanel.appendChild(htmlElement("h3", "", "Supporting text"));
    for (const snippet of hints.text.snippets) {
      const entry = htmlElement("blockquote", "snippet");
      entry.appendChild(htmlElement("strong", "", snippet.source_title));
      entry.appendChild(htmlElement("p", "", snippet.excerpt));
      textPanel.appendChild(entry);
    }
    container.appendChild(textPanel);
  }
}

export function renderBookmarkPanel(
  container: HTMLElement,
  state: ViewState,
  handlers: Handlers,
): void {
  container.textContent = "";
  container.appendChild(htmlElement("h2", "", "Bookmarked hypotheses"));
  const marked = bookmarkPanel(state);
  if (marked.length === 0) {
    container.appendChild(htmlElement("p", "placeholder", "No bookmarks yet."));
    return;
  }
  const list = htmlElement("ul", "bookmark-list");
  for (const node of marked) {
    const item = htmlElement("li", "bookmark-entry");
    item.dataset["nodeId"] = node.node_id;
    item.appendChild(htmlElement("strong", "", node.title));
    item.appendChild(htmlElement("span", "level", ` (level ${node.level})`));
    item.appendChild(htmlElement("p", "", node.hypothesis));
    item.addEventListener("click", () => handlers.onNodeClick(node.node_id));
    list.appendChild(item);
  }
  container.appendChild(list);
}

export function renderError(container: HTMLElement, state: ViewState): void {
  container.textContent = state.lastError ?? "";
  container.classList.toggle("visible", state.lastError !== null);
}
