import { describe, expect, it, vi } from "vitest";

import { ApiClient, BuildInProgress, tauQuery } from "../src/api.js";

function jsonResponse(body: unknown, status = 200, headers: Record<string, string> = {}) {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json", ...headers },
  });
}

describe("tau query encoding", () => {
  it("encodes absolute, quantile, and unrestricted forms", () => {
    expect(tauQuery({ kind: "absolute", value: 1.5 })).toBe("tau=1.5");
    expect(tauQuery({ kind: "quantile", q: 0.25 })).toBe("tau=q:0.25");
    expect(tauQuery({ kind: "unrestricted" })).toBe("");
  });
});

describe("api client", () => {
  it("builds snapshot urls and captures the etag", async () => {
    const calls: string[] = [];
    const fetchFn = vi.fn(async (url: RequestInfo | URL) => {
      calls.push(String(url));
      return jsonResponse({ n: 3 }, 200, { ETag: '"abc"' });
    });
    const client = new ApiClient("http://x", fetchFn as unknown as typeof fetch);
    const result = await client.getSnapshot("d1", { kind: "quantile", q: 0.5 }, 2, 7);
    expect(calls[0]).toBe("http://x/api/datasets/d1/snapshot?tau=q:0.5&k=2&seed=7");
    expect(result.etag).toBe('"abc"');
  });

  it("omits empty tau from the query", async () => {
    const calls: string[] = [];
    const fetchFn = vi.fn(async (url: RequestInfo | URL) => {
      calls.push(String(url));
      return jsonResponse({});
    });
    const client = new ApiClient("", fetchFn as unknown as typeof fetch);
    await client.getSnapshot("d1", { kind: "unrestricted" });
    expect(calls[0]).toBe("/api/datasets/d1/snapshot");
  });

  it("surfaces 409 build progress as BuildInProgress", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse({ status: "building", progress: 0.42 }, 409));
    const client = new ApiClient("", fetchFn as unknown as typeof fetch);
    await expect(client.getSnapshot("d1", { kind: "unrestricted" }))
      .rejects.toMatchObject({ progress: 0.42 });
    await expect(client.getHistogram("d1")).rejects.toBeInstanceOf(BuildInProgress);
  });

  it("maps error bodies onto ApiError messages", async () => {
    const fetchFn = vi.fn(async () => jsonResponse({ error: "unknown dataset x" }, 404));
    const client = new ApiClient("", fetchFn as unknown as typeof fetch);
    await expect(client.getData("x")).rejects.toThrow("unknown dataset x");
  });
});
