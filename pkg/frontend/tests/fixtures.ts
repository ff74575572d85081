import type {
  BranchOut,
  HintsOut,
  NodeOut,
  PositionOut,
  SessionOut,
} from "../src/types.js";

export function makeNode(overrides: Partial<NodeOut> & { node_id: string }): NodeOut {
  return {
    parent_id: null,
    level: 0,
    title: overrides.node_id,
    hypothesis: "",
    visualization: "",
    rationale: "",
    relatedWork: "",
    userInput: "",
    bookmarked: false,
    sibling_index: 0,
    ...overrides,
  };
}

export function makePosition(
  node_id: string,
  x: number,
  y: number,
  level: number,
): PositionOut {
  return { node_id, x, y, level };
}

/** root n1 with children n2..n6 at level 1, server-computed coordinates. */
export function sessionFixture(): SessionOut {
  const nodes: NodeOut[] = [
    makeNode({ node_id: "n1", title: "income inequality" }),
    ...[2, 3, 4, 5, 6].map((i) =>
      makeNode({
        node_id: `n${i}`,
        parent_id: "n1",
        level: 1,
        title: `Hypothesis ${i}`,
        hypothesis: `There is a pattern ${i}.`,
        visualization: "bar chart of income by education",
        rationale: `because ${i}`,
        sibling_index: i - 2,
      }),
    ),
  ];
  const layout: PositionOut[] = [
    makePosition("n1", 600, 0, 0),
    makePosition("n2", 200, 140, 1),
    makePosition("n3", 400, 140, 1),
    makePosition("n4", 600, 140, 1),
    makePosition("n5", 800, 140, 1),
    makePosition("n6", 1000, 140, 1),
  ];
  return {
    session_id: "s-fixture",
    tree: { root_id: "n1", nodes },
    layout,
    summary: {
      name: "census",
      row_count: 30,
      columns: [
        {
          name: "education",
          dtype: "categorical",
          unique_count: 5,
          null_count: 0,
          min_value: null,
          max_value: null,
          sample_values: ["Bachelors", "HS-grad"],
        },
        {
          name: "income",
          dtype: "numeric",
          unique_count: 20,
          null_count: 0,
          min_value: 10,
          max_value: 90,
          sample_values: [],
        },
      ],
    },
  };
}

/** Branch response growing n2 with three children, full relayout. */
export function branchFixture(): BranchOut {
  const newNodes = [7, 8, 9].map((i) =>
    makeNode({
      node_id: `n${i}`,
      parent_id: "n2",
      level: 2,
      title: `Deeper ${i}`,
      hypothesis: `There is a deeper pattern ${i}.`,
      userInput: "steer",
      sibling_index: i - 7,
    }),
  );
  const layout = [
    ...sessionFixture().layout,
    makePosition("n7", 90, 280, 2),
    makePosition("n8", 290, 280, 2),
    makePosition("n9", 490, 280, 2),
  ];
  return { new_nodes: newNodes, layout };
}

export function hintsFixture(): HintsOut {
  return {
    chart: {
      spec: {
        chart_type: "bar",
        x_field: "education",
        y_field: "income",
        aggregate: "mean",
        group_field: null,
      },
      series: [
        {
          label: "mean(income)",
          points: [
            ["Bachelors", 60],
            ["HS-grad", 35],
            ["Masters", 75],
          ],
        },
      ],
      row_basis: 30,
      caption: "bar chart of income by education",
    },
    text: {
      query: "Hypothesis 2 There is a pattern 2.",
      snippets: [
        {
          source_title: "income",
          excerpt: "Income inequality correlates with education.",
          source_uri: "file:///corpus/income.txt",
        },
      ],
    },
    warnings: [],
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
