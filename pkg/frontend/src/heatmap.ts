/** Similarity heatmap: rows and columns in the snapshot's spectral order,
 * darker = more similar. Clicking a row selects the datapoint everywhere;
 * hover reports (i, j, similarity). Rendering goes through an RGBA buffer so
 * large matrices stay cheap on canvas. */

import { similarityRgb, SELECTION } from "./color.js";
import type { Snapshot } from "./types.js";

export interface HeatmapCallbacks {
  onHover?: (info: { i: number; j: number; value: number } | null) => void;
  onSelect?: (pointIndex: number) => void;
}

/** n x n RGBA pixels of the reordered matrix (row r = order[r]). */
export function buildHeatmapPixels(snapshot: Snapshot): Uint8ClampedArray {
  const order = snapshot.spectral.order;
  const values = snapshot.similarity.values;
  const n = order.length;
  const pixels = new Uint8ClampedArray(n * n * 4);
  for (let r = 0; r < n; r++) {
    const row = values[order[r]];
    for (let c = 0; c < n; c++) {
      const [red, green, blue] = similarityRgb(row[order[c]]);
      const at = (r * n + c) * 4;
      pixels[at] = red;
      pixels[at + 1] = green;
      pixels[at + 2] = blue;
      pixels[at + 3] = 255;
    }
  }
  return pixels;
}

/** Canvas pixel -> (row, col) in reordered space, or null outside. */
export function hitCell(x: number, y: number, canvasSize: number, n: number):
    { row: number; col: number } | null {
  if (x < 0 || y < 0 || x >= canvasSize || y >= canvasSize || n === 0) {
    return null;
  }
  const row = Math.floor((y / canvasSize) * n);
  const col = Math.floor((x / canvasSize) * n);
  if (row >= n || col >= n) {
    return null;
  }
  return { row, col };
}

export class HeatmapView {
  private snapshot: Snapshot | null = null;
  private selection: Set<number> = new Set();

  constructor(private readonly canvas: HTMLCanvasElement,
              private readonly callbacks: HeatmapCallbacks = {}) {
    canvas.addEventListener("mousemove", (e) => this.handleHover(e));
    canvas.addEventListener("mouseleave", () => this.callbacks.onHover?.(null));
    canvas.addEventListener("click", (e) => this.handleClick(e));
  }

  render(snapshot: Snapshot | null, selection: Set<number>): void {
    this.snapshot = snapshot;
    this.selection = selection;
    const ctx = this.canvas.getContext("2d");
    if (!ctx) {
      return;
    }
    const size = this.canvas.width;
    ctx.clearRect(0, 0, size, this.canvas.height);
    if (!snapshot) {
      ctx.fillStyle = "#666";
      ctx.fillText("no snapshot loaded", 10, 20);
      return;
    }
    const n = snapshot.n;
    const pixels = buildHeatmapPixels(snapshot);
    const cell = Math.max(1, Math.floor(size / n));
    for (let r = 0; r < n; r++) {
      for (let c = 0; c < n; c++) {
        const at = (r * n + c) * 4;
        ctx.fillStyle = `rgb(${pixels[at]},${pixels[at + 1]},${pixels[at + 2]})`;
        ctx.fillRect(Math.floor((c * size) / n), Math.floor((r * size) / n), cell + 1, cell + 1);
      }
    }
    // outline the selected rows/columns
    const order = snapshot.spectral.order;
    ctx.strokeStyle = SELECTION;
    ctx.lineWidth = 2;
    for (let r = 0; r < n; r++) {
      if (this.selection.has(order[r])) {
        const y = Math.floor((r * size) / n);
        ctx.strokeRect(0, y, size, Math.max(cell, 2));
      }
    }
  }

  private cellAt(e: MouseEvent): { row: number; col: number } | null {
    if (!this.snapshot) {
      return null;
    }
    const rect = this.canvas.getBoundingClientRect();
    return hitCell(e.clientX - rect.left, e.clientY - rect.top,
                   this.canvas.width, this.snapshot.n);
  }

  private handleHover(e: MouseEvent): void {
    const cell = this.cellAt(e);
    if (!cell || !this.snapshot) {
      this.callbacks.onHover?.(null);
      return;
    }
    const order = this.snapshot.spectral.order;
    const i = order[cell.row];
    const j = order[cell.col];
    this.callbacks.onHover?.({ i, j, value: this.snapshot.similarity.values[i][j] });
  }

  private handleClick(e: MouseEvent): void {
    const cell = this.cellAt(e);
    if (!cell || !this.snapshot) {
      return;
    }
    this.callbacks.onSelect?.(this.snapshot.spectral.order[cell.row]);
  }
}
