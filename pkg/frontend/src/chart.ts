/** Renderable primitives for a server-computed chart payload.
 *
 * The server already aggregated the data; this module only scales the given
 * points into a fixed plotting box. Bars for bar/histogram, circles for
 * scatter/box, polylines for line charts.
 */

import type { ChartOut, SeriesOut } from "./types.js";

export const PLOT_WIDTH = 360;
export const PLOT_HEIGHT = 200;
export const PLOT_PADDING = 28;

export interface BarMark {
  kind: "bar";
  x: number;
  y: number;
  width: number;
  height: number;
  label: string;
}

export interface PointMark {
  kind: "point";
  cx: number;
  cy: number;
  series: string;
}

export interface LineMark {
  kind: "line";
  points: string; // SVG polyline points attribute
  series: string;
}

export type Mark = BarMark | PointMark | LineMark;

export interface AxisTick {
  position: number;
  label: string;
}

export interface ChartView {
  marks: Mark[];
  xTicks: AxisTick[];
  caption: string;
  rowBasis: number;
}

interface Scales {
  xFor: (value: number | string) => number;
  yFor: (value: number) => number;
  band: number;
  categories: string[];
}

function collectPoints(series: SeriesOut[]): [number | string, number | string][] {
  return series.flatMap((s) => s.points);
}

function buildScales(series: SeriesOut[]): Scales {
  const points = collectPoints(series);
  const xs = points.map((p) => p[0]);
  const ys = points.map((p) => Number(p[1]));
  const numericX = xs.every((x) => typeof x === "number");

  const innerWidth = PLOT_WIDTH - 2 * PLOT_PADDING;
  const innerHeight = PLOT_HEIGHT - 2 * PLOT_PADDING;

  let yLo = Math.min(0, ...ys);
  let yHi = Math.max(0, ...ys);
  if (yHi === yLo) yHi = yLo + 1;
  const yFor = (value: number) =>
    PLOT_HEIGHT - PLOT_PADDING - ((value - yLo) / (yHi - yLo)) * innerHeight;

  if (numericX && xs.length > 0) {
    const nums = xs as number[];
    let xLo = Math.min(...nums);
    let xHi = Math.max(...nums);
    if (xHi === xLo) xHi = xLo + 1;
    return {
      xFor: (value) => PLOT_PADDING + ((Number(value) - xLo) / (xHi - xLo)) * innerWidth,
      yFor,
      band: innerWidth / Math.max(1, new Set(nums).size) - 2,
      categories: [],
    };
  }
  const categories = [...new Set(xs.map(String))];
  const band = innerWidth / Math.max(1, categories.length);
  return {
    xFor: (value) => PLOT_PADDING + categories.indexOf(String(value)) * band + band / 2,
    yFor,
    band: band - 6,
    categories,
  };
}

export function buildChart(chart: ChartOut): ChartView {
  const scales = buildScales(chart.series);
  const marks: Mark[] = [];
  const kind = chart.spec.chart_type;

  for (const series of chart.series) {
    if (kind === "line") {
      const path = series.points
        .map(([x, y]) => `${scales.xFor(x)},${scales.yFor(Number(y))}`)
        .join(" ");
      marks.push({ kind: "line", points: path, series: series.label });
    } else if (kind === "bar" || kind === "histogram") {
      for (const [x, y] of series.points) {
        const top = scales.yFor(Number(y));
        const base = scales.yFor(0);
        marks.push({
          kind: "bar",
          x: scales.xFor(x) - scales.band / 2,
          y: Math.min(top, base),
          width: Math.max(1, scales.band),
          height: Math.abs(base - top),
          label: String(x),
        });
      }
    } else {
      for (const [x, y] of series.points) {
        marks.push({
          kind: "point",
          cx: scales.xFor(x),
          cy: scales.yFor(Number(y)),
          series: series.label,
        });
      }
    }
  }

  const xTicks: AxisTick[] = scales.categories.map((label) => ({
    position: scales.xFor(label),
    label,
  }));
  return { marks, xTicks, caption: chart.caption, rowBasis: chart.row_basis };
}
