/** Shared fixtures: a recording canvas 2D stub (jsdom ships no canvas
 * implementation) and a deterministic snapshot builder. */

import type { Snapshot } from "../src/types.js";

export interface RecordedCall {
  method: string;
  args: unknown[];
}

export function stubCanvas(): RecordedCall[] {
  const calls: RecordedCall[] = [];
  const makeCtx = () =>
    new Proxy(
      {},
      {
        get(_target, prop: string) {
          if (prop === "canvas") {
            return null;
          }
          return (...args: unknown[]) => {
            calls.push({ method: prop, args });
          };
        },
        set() {
          return true;
        },
      },
    );
  (HTMLCanvasElement.prototype as unknown as { getContext: unknown }).getContext =
    function getContext() {
      return makeCtx();
    };
  return calls;
}

/** A tiny synthetic snapshot: n points, two blocks, deterministic fields. */
export function makeSnapshot(n = 6): Snapshot {
  const half = Math.floor(n / 2);
  const values: number[][] = [];
  for (let i = 0; i < n; i++) {
    values.push([]);
    for (let j = 0; j < n; j++) {
      const sameBlock = (i < half) === (j < half);
      values[i].push(i === j ? 1.0 : sameBlock ? 0.8 : 0.2);
    }
  }
  const order = [...Array(n).keys()].sort((a, b) => (a % half) - (b % half) || a - b);
  return {
    snapshot_version: 1,
    dataset_id: "fixture",
    n,
    band_count: 15,
    unmasked_band_count: 10,
    tau: 1.5,
    tau_quantile: 0.5,
    k: 2,
    seed: 0,
    depths: [...Array(n).keys()].map((i) => 1 - i / n),
    coloring: {
      bins: [...Array(n).keys()].map((i) => Math.min(3, Math.floor((4 * i) / n))),
      thresholds: [0.8, 0.6, 0.2],
    },
    outliers: { flags: Array(n).fill(false), lower_fence: 0 },
    similarity: { tau: 1.5, order: [...Array(n).keys()], values },
    spectral: {
      eigenvalues: [0, 0.5, 0.9],
      labels: [...Array(n).keys()].map((i) => (i < half ? 0 : 1)),
      order,
      k: 2,
      suggested_k: 2,
      suggestion_confidence: 1,
    },
    layout: {
      mode: "force",
      iterations: 10,
      energy: 0,
      positions: [...Array(n).keys()].map((i) => [((i % half) + 0.5) / (half + 1),
                                                  i < half ? 0.25 : 0.75]),
      isolated: [],
      collision_passes: 0,
    },
    histogram: {
      edges: [0, 1, 2],
      counts: [10, 5],
      quantiles: [...Array(101).keys()].map((q) => q / 50),
      log_scale: false,
    },
    summaries: [
      {
        name: "tag",
        kind: "categorical_set",
        stacked: { a: [1, 1, 0, 0], b: [0, 0, 2, 2] },
      },
      { name: "x", kind: "scalar", five_num: [0, 1, 2, 3, 4], outliers: [] },
    ],
  };
}
