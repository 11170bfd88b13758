/** Similarity-induced layout: nodes at the snapshot's positions, colored by
 * depth bin, edges drawn for pairs above the edge threshold (rendering only,
 * the threshold never feeds back into anything). Geospatial snapshots draw
 * the full polylines colored by bin. Outliers sit near the border; hover
 * shows label plus depth; selection is highlighted across views. */

import { depthColor, OUTLIER_RING, SELECTION } from "./color.js";
import type { Snapshot } from "./types.js";

export interface LayoutCallbacks {
  onHover?: (pointIndex: number | null) => void;
  onSelect?: (pointIndex: number) => void;
}

export interface Edge {
  i: number;
  j: number;
  weight: number;
}

/** Upper-triangle pairs with positive similarity >= threshold. */
export function edgesForThreshold(values: number[][], threshold: number): Edge[] {
  const out: Edge[] = [];
  const n = values.length;
  for (let i = 0; i < n - 1; i++) {
    for (let j = i + 1; j < n; j++) {
      const w = values[i][j];
      if (w > 0 && w >= threshold) {
        out.push({ i, j, weight: w });
      }
    }
  }
  return out;
}

/** Index of the node within `radius` canvas pixels of (x, y), or null. */
export function nearestNode(x: number, y: number,
                            positions: Array<[number, number]>,
                            canvasW: number, canvasH: number,
                            radius: number): number | null {
  let best: number | null = null;
  let bestD = radius * radius;
  positions.forEach(([px, py], idx) => {
    const dx = px * canvasW - x;
    const dy = py * canvasH - y;
    const d = dx * dx + dy * dy;
    if (d <= bestD) {
      best = idx;
      bestD = d;
    }
  });
  return best;
}

export class LayoutView {
  private snapshot: Snapshot | null = null;
  private labels: string[] | null = null;

  constructor(private readonly canvas: HTMLCanvasElement,
              private readonly callbacks: LayoutCallbacks = {}) {
    canvas.addEventListener("mousemove", (e) => {
      this.callbacks.onHover?.(this.nodeAt(e));
    });
    canvas.addEventListener("mouseleave", () => this.callbacks.onHover?.(null));
    canvas.addEventListener("click", (e) => {
      const hit = this.nodeAt(e);
      if (hit !== null) {
        this.callbacks.onSelect?.(hit);
      }
    });
  }

  setLabels(labels: string[] | null): void {
    this.labels = labels;
  }

  labelFor(index: number): string {
    return this.labels?.[index] ?? `#${index}`;
  }

  render(snapshot: Snapshot | null, edgeThreshold: number, selection: Set<number>,
         hovered: number | null): void {
    this.snapshot = snapshot;
    const ctx = this.canvas.getContext("2d");
    if (!ctx) {
      return;
    }
    const w = this.canvas.width;
    const h = this.canvas.height;
    ctx.clearRect(0, 0, w, h);
    if (!snapshot) {
      ctx.fillStyle = "#666";
      ctx.fillText("no snapshot loaded", 10, 20);
      return;
    }
    const positions = snapshot.layout.positions;
    const bins = snapshot.coloring.bins;

    if (snapshot.layout.mode === "geospatial" && snapshot.layout.polylines) {
      for (let i = 0; i < snapshot.layout.polylines.length; i++) {
        const line = snapshot.layout.polylines[i];
        ctx.strokeStyle = depthColor(bins[i]);
        ctx.lineWidth = selection.has(i) || hovered === i ? 3 : 1.5;
        ctx.beginPath();
        line.forEach(([x, y], t) => {
          if (t === 0) {
            ctx.moveTo(x * w, y * h);
          } else {
            ctx.lineTo(x * w, y * h);
          }
        });
        ctx.stroke();
      }
    } else {
      ctx.strokeStyle = "rgba(120,120,120,0.35)";
      ctx.lineWidth = 1;
      for (const edge of edgesForThreshold(snapshot.similarity.values, edgeThreshold)) {
        ctx.beginPath();
        ctx.moveTo(positions[edge.i][0] * w, positions[edge.i][1] * h);
        ctx.lineTo(positions[edge.j][0] * w, positions[edge.j][1] * h);
        ctx.stroke();
      }
    }

    const r = Math.max(3, 0.4 / Math.sqrt(Math.max(snapshot.n, 1)) * Math.min(w, h) * 0.5);
    const isolated = new Set(snapshot.layout.isolated);
    positions.forEach(([x, y], idx) => {
      ctx.beginPath();
      ctx.arc(x * w, y * h, r, 0, 2 * Math.PI);
      ctx.fillStyle = depthColor(bins[idx]);
      ctx.fill();
      if (snapshot.outliers.flags[idx] || isolated.has(idx)) {
        ctx.strokeStyle = OUTLIER_RING;
        ctx.lineWidth = 1.5;
        ctx.stroke();
      }
      if (selection.has(idx) || hovered === idx) {
        ctx.strokeStyle = SELECTION;
        ctx.lineWidth = 2.5;
        ctx.stroke();
      }
    });
  }

  private nodeAt(e: MouseEvent): number | null {
    if (!this.snapshot) {
      return null;
    }
    const rect = this.canvas.getBoundingClientRect();
    return nearestNode(e.clientX - rect.left, e.clientY - rect.top,
                       this.snapshot.layout.positions,
                       this.canvas.width, this.canvas.height, 12);
  }
}
