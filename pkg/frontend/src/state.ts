/** Single source of truth for the explorer.
 *
 * Every view renders from (latest snapshot, ViewState); there is no
 * view-local hidden state. Tau changes are debounced and requests are
 * latest-wins: a stale response can never overwrite a newer snapshot, so the
 * linked views are always consistent with exactly one snapshot (the footer
 * exposes its hash for the consistency check).
 */

import type { DatasetJson, Snapshot, TauParam } from "./types.js";

export interface Brush {
  attribute: string;
  label: string;
}

export interface ViewState {
  datasetId: string | null;
  dataset: DatasetJson | null;
  tau: TauParam;
  tauQuantileMirror: number | null; // slider position when tau came from the slider
  kOverride: number | null;
  edgeThreshold: number;
  hoveredPoint: number | null;
  selectedPoint: number | null;
  brush: Brush | null;
  snapshot: Snapshot | null;
  snapshotTag: string | null;       // ETag of the snapshot every view renders
  buildProgress: number | null;
  requestInFlight: boolean;
  error: string | null;
}

export function initialState(): ViewState {
  return {
    datasetId: null,
    dataset: null,
    tau: { kind: "unrestricted" },
    tauQuantileMirror: null,
    kOverride: null,
    edgeThreshold: 0.9,
    hoveredPoint: null,
    selectedPoint: null,
    brush: null,
    snapshot: null,
    snapshotTag: null,
    buildProgress: null,
    requestInFlight: false,
    error: null,
  };
}

export type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState = initialState();
  private listeners: Listener[] = [];

  get(): ViewState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }
}

/** The selection every view highlights: a brushed category selects all rows
 * holding that label; otherwise the clicked point (if any). */
export function selectionSet(state: ViewState): Set<number> {
  const out = new Set<number>();
  if (state.brush && state.dataset) {
    const column = state.dataset.schema.findIndex((s) => s.name === state.brush!.attribute);
    if (column >= 0) {
      state.dataset.rows.forEach((row, i) => {
        const cell = row[column];
        if (Array.isArray(cell) && (cell as unknown[]).includes(state.brush!.label)) {
          out.add(i);
        }
      });
    }
    return out;
  }
  if (state.selectedPoint !== null) {
    out.add(state.selectedPoint);
  }
  return out;
}

/** Latest-wins, debounced scheduler for snapshot refetches. Rapid slider
 * scrubbing coalesces into a single request; only the newest response is
 * applied. */
export class SnapshotScheduler {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private token = 0;

  constructor(private readonly debounceMs: number,
              private readonly run: (token: number) => void) {}

  request(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    const token = ++this.token;
    this.timer = setTimeout(() => {
      this.timer = null;
      this.run(token);
    }, this.debounceMs);
  }

  /** Immediate (undebounced) request; still latest-wins. */
  requestNow(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.run(++this.token);
  }

  isLatest(token: number): boolean {
    return token === this.token;
  }
}
