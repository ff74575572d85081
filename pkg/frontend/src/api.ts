/** Thin client for the exploration API. Every method is one HTTP call. */

import type {
  AnalyticsOut,
  BranchOut,
  HintsOut,
  NodeOut,
  RegenerateOut,
  SessionOut,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async createSession(dataset: Blob, filename: string, intent: string): Promise<SessionOut> {
    const form = new FormData();
    form.append("dataset", dataset, filename);
    form.append("intent", intent);
    return this.request<SessionOut>("POST", "/sessions", { body: form });
  }

  async getSession(sessionId: string): Promise<SessionOut> {
    return this.request<SessionOut>("GET", `/sessions/${sessionId}`);
  }

  async branch(sessionId: string, nodeId: string, userInput?: string): Promise<BranchOut> {
    return this.request<BranchOut>(
      "POST",
      `/sessions/${sessionId}/nodes/${nodeId}/branch`,
      { json: userInput ? { user_input: userInput } : {} },
    );
  }

  async regenerate(
    sessionId: string,
    nodeId: string,
    userInput?: string,
  ): Promise<RegenerateOut> {
    return this.request<RegenerateOut>(
      "POST",
      `/sessions/${sessionId}/nodes/${nodeId}/regenerate`,
      { json: userInput ? { user_input: userInput } : {} },
    );
  }

  async hints(sessionId: string, nodeId: string, expand = false): Promise<HintsOut> {
    const query = expand ? "?expand=true" : "";
    return this.request<HintsOut>(
      "GET",
      `/sessions/${sessionId}/nodes/${nodeId}/hints${query}`,
    );
  }

  async bookmark(sessionId: string, nodeId: string, flag: boolean): Promise<NodeOut> {
    return this.request<NodeOut>(
      "POST",
      `/sessions/${sessionId}/nodes/${nodeId}/bookmark`,
      { json: { flag } },
    );
  }

  async collapse(sessionId: string, nodeId: string): Promise<{ node_id: string }> {
    return this.request("POST", `/sessions/${sessionId}/nodes/${nodeId}/collapse`);
  }

  async analytics(sessionId: string): Promise<AnalyticsOut> {
    return this.request<AnalyticsOut>("GET", `/sessions/${sessionId}/analytics`);
  }

  private async request<T>(
    method: string,
    path: string,
    options: { json?: unknown; body?: BodyInit } = {},
  ): Promise<T> {
    const init: RequestInit = { method };
    if (options.json !== undefined) {
      init.body = JSON.stringify(options.json);
      init.headers = { "Content-Type": "application/json" };
    } else if (options.body !== undefined) {
      init.body = options.body;
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let code = "HttpError";
      let detail = `${response.status}`;
      try {
        const body = (await response.json()) as { error?: string; detail?: string };
        code = body.error ?? code;
        detail = body.detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, code, detail);
    }
    return (await response.json()) as T;
  }
}
