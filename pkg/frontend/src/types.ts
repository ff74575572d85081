/** Wire types mirroring the server's published schemas (see GET /schema). */

export interface NodeOut {
  node_id: string;
  parent_id: string | null;
  level: number;
  title: string;
  hypothesis: string;
  visualization: string;
  rationale: string;
  relatedWork: string;
  userInput: string;
  bookmarked: boolean;
  sibling_index: number;
}

export interface PositionOut {
  node_id: string;
  x: number;
  y: number;
  level: number;
}

export interface ColumnOut {
  name: string;
  dtype: string;
  unique_count: number;
  null_count: number;
  min_value: number | null;
  max_value: number | null;
  sample_values: string[];
}

export interface SummaryOut {
  name: string;
  row_count: number;
  columns: ColumnOut[];
}

export interface SessionOut {
  session_id: string;
  tree: { root_id: string; nodes: NodeOut[] };
  layout: PositionOut[];
  summary: SummaryOut;
}

export interface BranchOut {
  new_nodes: NodeOut[];
  layout: PositionOut[];
}

export interface RegenerateOut extends BranchOut {
  removed_count: number;
}

export interface SpecOut {
  chart_type: string;
  x_field: string;
  y_field: string | null;
  aggregate: string;
  group_field: string | null;
}

export interface SeriesOut {
  label: string;
  points: [number | string, number | string][];
}

export interface ChartOut {
  spec: SpecOut;
  series: SeriesOut[];
  row_basis: number;
  caption: string;
}

export interface SnippetOut {
  source_title: string;
  excerpt: string;
  source_uri: string;
}

export interface TextOut {
  query: string;
  snippets: SnippetOut[];
}

export interface HintsOut {
  chart: ChartOut | null;
  text: TextOut | null;
  warnings: string[];
}

export interface AnalyticsOut {
  session_id: string;
  intent_text: string;
  diagram: Record<string, unknown>;
  exploration: { clicks: number; generations: number; total_explored: number };
  backtracks: Record<string, unknown>;
  engagement: {
    initial_expansions: number;
    re_expansions: number;
    total: number;
  };
  bookmarks: { participant: string; title: string; description: string; level: number }[];
}
