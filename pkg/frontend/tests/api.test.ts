import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { branchFixture, jsonResponse, sessionFixture } from "./fixtures.js";

function capture(makeResponse: () => Response) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const fetchFn = vi.fn(async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return makeResponse();
  });
  return { fetchFn, calls };
}

describe("ApiClient", () => {
  it("posts multipart dataset and intent on session creation", async () => {
    const { fetchFn, calls } = capture(() => jsonResponse(sessionFixture()));
    const client = new ApiClient("http://api", fetchFn);
    await client.createSession(new Blob(["a,b\n1,2\n"]), "census.csv", "income inequality");

    expect(calls).toHaveLength(1);
    expect(calls[0]!.url).toBe("http://api/sessions");
    expect(calls[0]!.init?.method).toBe("POST");
    const body = calls[0]!.init?.body as FormData;
    expect(body.get("intent")).toBe("income inequality");
    expect((body.get("dataset") as File).name).toBe("census.csv");
  });

  it("branch sends user_input in the JSON body", async () => {
    const { fetchFn, calls } = capture(() => jsonResponse(branchFixture()));
    const client = new ApiClient("", fetchFn);
    await client.branch("s1", "n2", "University prestige comes from previous wealth");

    expect(calls[0]!.url).toBe("/sessions/s1/nodes/n2/branch");
    expect(JSON.parse(calls[0]!.init?.body as string)).toEqual({
      user_input: "University prestige comes from previous wealth",
    });
  });

  it("branch omits user_input when none is given", async () => {
    const { fetchFn, calls } = capture(() => jsonResponse(branchFixture()));
    const client = new ApiClient("", fetchFn);
    await client.branch("s1", "n2");
    expect(JSON.parse(calls[0]!.init?.body as string)).toEqual({});
  });

  it("hints toggles the expand query flag", async () => {
    const { fetchFn, calls } = capture(() =>
      jsonResponse({ chart: null, text: null, warnings: [] }),
    );
    const client = new ApiClient("", fetchFn);
    await client.hints("s1", "n2");
    await client.hints("s1", "n2", true);
    expect(calls[0]!.url).toBe("/sessions/s1/nodes/n2/hints");
    expect(calls[1]!.url).toBe("/sessions/s1/nodes/n2/hints?expand=true");
  });

  it("bookmark posts the flag", async () => {
    const { fetchFn, calls } = capture(() => jsonResponse(sessionFixture().tree.nodes[1]));
    const client = new ApiClient("", fetchFn);
    await client.bookmark("s1", "n2", true);
    expect(calls[0]!.url).toBe("/sessions/s1/nodes/n2/bookmark");
    expect(JSON.parse(calls[0]!.init?.body as string)).toEqual({ flag: true });
  });

  it("collapse posts to the collapse route", async () => {
    const { fetchFn, calls } = capture(() => jsonResponse({ node_id: "n2", logged: true }));
    const client = new ApiClient("", fetchFn);
    await client.collapse("s1", "n2");
    expect(calls[0]!.url).toBe("/sessions/s1/nodes/n2/collapse");
    expect(calls[0]!.init?.method).toBe("POST");
  });

  it("maps error payloads to typed ApiError", async () => {
    const { fetchFn } = capture(() =>
      jsonResponse({ error: "BusySession", detail: "in flight" }, 409),
    );
    const client = new ApiClient("", fetchFn);
    const failure = client.branch("s1", "n2");
    await expect(failure).rejects.toBeInstanceOf(ApiError);
    await expect(client.branch("s1", "n2")).rejects.toMatchObject({
      status: 409,
      code: "BusySession",
    });
  });
});
