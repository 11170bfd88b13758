/** Linked-views contract against the real analysis service.
 *
 * Spawns the Python service, uploads a two-mode fixture with a mode-aligned
 * categorical attribute, boots the explorer in jsdom (canvas stubbed), and
 * drives it: scrubbing the tau slider across one quantile must update the
 * heatmap ordering, the node colors, and the cluster count with exactly one
 * debounced snapshot refresh; clicking a heatmap row must highlight the same
 * datapoint in the layout; brushing a category must select exactly the rows
 * holding it. An in-process DOM stands in for a browser here: no browser
 * binaries are installable in this environment (see the decisions ledger).
 */

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { boot, type ExplorerApp } from "../src/main.js";
import { selectionSet } from "../src/state.js";
import { stubCanvas } from "./helpers.js";

const frac = (x: number) => x - Math.floor(x);
const g3 = (i: number) =>
  frac(Math.sin(i * 12.9898) * 43758.5453) +
  frac(Math.sin(i * 78.233) * 12345.6789) +
  frac(Math.sin(i * 37.719) * 24681.357) - 1.5;

function fixtureDataset() {
  const rows: Array<[number, string[]]> = [];
  for (let i = 0; i < 60; i++) {
    const mode = i % 2;
    const value = (mode ? 3.0 : -3.0) + g3(i);
    const flip = frac(Math.sin(i * 91.17) * 55555.55) < 0.15;
    const ring = flip ? (mode ? "e" : "p") : (mode ? "p" : "e");
    rows.push([value, [ring]]);
  }
  return {
    schema: [
      { name: "value", kind: "scalar" },
      { name: "ring", kind: "categorical_set", universe: ["e", "p"] },
    ],
    rows,
  };
}

async function waitFor(predicate: () => boolean, what: string,
                       timeoutMs = 90_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) {
      return;
    }
    await new Promise((resolve) => setTimeout(resolve, 50));
  }
  throw new Error(`timed out waiting for ${what}`);
}

describe("explorer against the live service", () => {
  let service: ChildProcess;
  let base = "";
  let app: ExplorerApp;
  let snapshotRequests: string[] = [];

  beforeAll(async () => {
    service = spawn("python3", ["-m", "depthscope.cli", "serve", "--port", "0"],
                    { stdio: ["ignore", "pipe", "pipe"] });
    base = await new Promise<string>((resolve, reject) => {
      let buffer = "";
      service.stdout!.on("data", (chunk: Buffer) => {
        buffer += chunk.toString();
        const match = buffer.match(/listening on (http:\/\/127\.0\.0\.1:\d+)/);
        if (match) {
          resolve(match[1]);
        }
      });
      service.on("exit", (code) => reject(new Error(`service exited: ${code}`)));
      setTimeout(() => reject(new Error("service did not announce a port")), 30_000);
    });

    const realFetch = globalThis.fetch.bind(globalThis);
    globalThis.fetch = ((input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      if (url.includes("/snapshot")) {
        snapshotRequests.push(url);
      }
      return realFetch(input, init);
    }) as typeof fetch;

    stubCanvas();
    document.body.innerHTML = `
      <select id="dataset-select"></select>
      <input id="dataset-upload" type="file">
      <input id="k-override" type="number">
      <div id="status"></div><div id="hover"></div>
      <canvas id="heatmap" width="300" height="300"></canvas>
      <canvas id="layout" width="300" height="300"></canvas>
      <canvas id="histogram" width="300" height="100"></canvas>
      <div id="controls"></div>
      <div id="attributes"></div>`;

    app = boot(document, base);

    const upload = await fetch(`${base}/api/datasets`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(fixtureDataset()),
    });
    const { id } = (await upload.json()) as { id: string };
    // wait for the inclusion matrix build before selecting
    let ready = false;
    while (!ready) {
      const status = await (await fetch(`${base}/api/datasets/${id}`)).json() as { status: string };
      ready = status.status === "ready";
      if (!ready) {
        await new Promise((resolve) => setTimeout(resolve, 100));
      }
    }
    await app.selectDataset(id);
    await waitFor(() => app.store.get().snapshot !== null, "first snapshot");
  }, 120_000);

  afterAll(() => {
    service?.kill();
  });

  it("starts wide open with a single cluster", () => {
    const snapshot = app.store.get().snapshot!;
    expect(snapshot.tau).toBeNull();
    expect(snapshot.k).toBe(1);
    expect(snapshot.n).toBe(60);
    expect(app.store.get().dataset?.rows).toHaveLength(60);
  });

  it("scrubbing the tau slider updates order, colors, and cluster count "
     + "with one debounced refresh", async () => {
    const before = app.store.get().snapshot!;
    const beforeTag = app.store.get().snapshotTag;
    snapshotRequests = [];

    const slider = app.histogram.tauSlider;
    for (const v of ["30", "40", "50"]) {
      slider.value = v;
      slider.dispatchEvent(new Event("input"));
      slider.dispatchEvent(new Event("change"));
      await new Promise((resolve) => setTimeout(resolve, 40)); // inside debounce
    }
    await waitFor(() => app.store.get().snapshot?.tau_quantile === 0.5,
                  "snapshot at q0.5");
    await waitFor(() => !app.store.get().requestInFlight, "request settled");

    expect(snapshotRequests).toHaveLength(1); // rapid scrub coalesced
    const after = app.store.get().snapshot!;
    expect(after.k).toBe(2);                               // cluster count updated
    expect(after.spectral.order).not.toEqual(before.spectral.order); // heatmap reordered
    expect(after.coloring.bins).not.toEqual(before.coloring.bins);   // node colors updated
    expect(app.store.get().snapshotTag).not.toBe(beforeTag);
  });

  it("clicking a heatmap row highlights the same datapoint in the layout", () => {
    const snapshot = app.store.get().snapshot!;
    const heatmapCanvas = document.getElementById("heatmap") as HTMLCanvasElement;
    heatmapCanvas.dispatchEvent(new MouseEvent("click", { clientX: 4, clientY: 4 }));
    const expected = snapshot.spectral.order[0];
    const state = app.store.get();
    expect(state.selectedPoint).toBe(expected);
    expect([...selectionSet(state)]).toEqual([expected]); // what the layout highlights
  });

  it("brushing a category highlights exactly the rows holding it", async () => {
    await waitFor(() => document.querySelectorAll(".stacked-row").length > 0,
                  "attribute panel rows");
    const rows = document.querySelectorAll<HTMLElement>(".stacked-row");
    const pRow = [...rows].find((r) => r.dataset.label === "p")!;
    pRow.dispatchEvent(new Event("click"));
    const state = app.store.get();
    expect(state.brush).toEqual({ attribute: "ring", label: "p" });
    const holders = new Set<number>();
    fixtureDataset().rows.forEach((row, i) => {
      if ((row[1] as string[]).includes("p")) {
        holders.add(i);
      }
    });
    expect(selectionSet(state)).toEqual(holders);
    expect(holders.size).toBe(37);
  });
});
