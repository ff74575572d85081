import { describe, expect, it } from "vitest";

import { PLOT_HEIGHT, PLOT_PADDING, buildChart } from "../src/chart.js";
import { hintsFixture } from "./fixtures.js";
import type { ChartOut } from "../src/types.js";

describe("chart view", () => {
  it("emits one bar per aggregated point", () => {
    const chart = hintsFixture().chart!;
    const view = buildChart(chart);
    const bars = view.marks.filter((m) => m.kind === "bar");
    expect(bars).toHaveLength(3);
    expect(view.xTicks.map((t) => t.label)).toEqual(["Bachelors", "HS-grad", "Masters"]);
  });

  it("bar heights scale with the aggregated values", () => {
    const view = buildChart(hintsFixture().chart!);
    const bars = view.marks.filter((m) => m.kind === "bar") as {
      label: string;
      height: number;
    }[];
    const byLabel = new Map(bars.map((b) => [b.label, b.height]));
    expect(byLabel.get("Masters")!).toBeGreaterThan(byLabel.get("HS-grad")!);
  });

  it("scatter series become point marks", () => {
    const chart: ChartOut = {
      spec: {
        chart_type: "scatter",
        x_field: "age",
        y_field: "income",
        aggregate: "none",
        group_field: null,
      },
      series: [
        {
          label: "income",
          points: [
            [20, 10],
            [40, 50],
            [60, 30],
          ],
        },
      ],
      row_basis: 3,
      caption: "scatterplot of age and income",
    };
    const view = buildChart(chart);
    const points = view.marks.filter((m) => m.kind === "point");
    expect(points).toHaveLength(3);
  });

  it("line series become one polyline per series", () => {
    const chart: ChartOut = {
      spec: {
        chart_type: "line",
        x_field: "age",
        y_field: "income",
        aggregate: "mean",
        group_field: "group",
      },
      series: [
        { label: "g1", points: [[20, 10], [30, 20]] },
        { label: "g2", points: [[20, 30], [30, 10]] },
      ],
      row_basis: 4,
      caption: "line chart",
    };
    const view = buildChart(chart);
    const lines = view.marks.filter((m) => m.kind === "line");
    expect(lines).toHaveLength(2);
  });

  it("y scaling is monotonic within the plot box", () => {
    const chart = hintsFixture().chart!;
    const view = buildChart(chart);
    for (const mark of view.marks) {
      if (mark.kind === "bar") {
        expect(mark.y).toBeGreaterThanOrEqual(0);
        expect(mark.y + mark.height).toBeLessThanOrEqual(PLOT_HEIGHT - PLOT_PADDING + 1e-9);
      }
    }
  });
});
