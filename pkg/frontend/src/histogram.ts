/** Band-size histogram plus the tau slider (snapped to the 0..100% band-size
 * quantiles) and the edge-drawing slider. Tau refetches are release-triggered
 * and debounced upstream; the edge slider only changes rendering. */

import type { HistogramBlock, TauParam } from "./types.js";

export interface HistogramCallbacks {
  onTauQuantile?: (q: number) => void;
  onEdgeThreshold?: (threshold: number) => void;
}

/** Slider position 0..100 -> tau parameter; the top of the range means no
 * restriction at all (tau = +inf), anything below is a band-size quantile. */
export function tauFromSliderIndex(index: number): TauParam {
  const clamped = Math.max(0, Math.min(100, Math.round(index)));
  if (clamped >= 100) {
    return { kind: "unrestricted" };
  }
  return { kind: "quantile", q: clamped / 100 };
}

export class HistogramView {
  private histogram: HistogramBlock | null = null;
  readonly tauSlider: HTMLInputElement;
  readonly edgeSlider: HTMLInputElement;
  private readonly tauLabel: HTMLElement;

  constructor(private readonly canvas: HTMLCanvasElement,
              controls: HTMLElement,
              private readonly callbacks: HistogramCallbacks = {}) {
    this.tauSlider = document.createElement("input");
    this.tauSlider.type = "range";
    this.tauSlider.min = "0";
    this.tauSlider.max = "100";
    this.tauSlider.value = "100";
    this.tauSlider.title = "band-size threshold (quantile)";
    this.tauLabel = document.createElement("span");
    this.tauLabel.className = "tau-label";
    this.edgeSlider = document.createElement("input");
    this.edgeSlider.type = "range";
    this.edgeSlider.min = "0";
    this.edgeSlider.max = "100";
    this.edgeSlider.value = "90";
    this.edgeSlider.title = "edge-drawing threshold (rendering only)";

    const tauRow = document.createElement("label");
    tauRow.append("tau ", this.tauSlider, this.tauLabel);
    const edgeRow = document.createElement("label");
    edgeRow.append("edges ", this.edgeSlider);
    controls.append(tauRow, edgeRow);

    // release-triggered: "change" fires when the user lets go of the handle
    this.tauSlider.addEventListener("change", () => {
      this.callbacks.onTauQuantile?.(Number(this.tauSlider.value) / 100);
      this.updateTauLabel();
    });
    this.tauSlider.addEventListener("input", () => this.updateTauLabel());
    this.edgeSlider.addEventListener("input", () => {
      this.callbacks.onEdgeThreshold?.(Number(this.edgeSlider.value) / 100);
    });
  }

  private updateTauLabel(): void {
    if (!this.histogram) {
      this.tauLabel.textContent = "";
      return;
    }
    const idx = Number(this.tauSlider.value);
    const size = this.histogram.quantiles[Math.max(0, Math.min(100, idx))];
    this.tauLabel.textContent = idx >= 100
      ? " (unrestricted)"
      : ` q${(idx / 100).toFixed(2)} = ${size.toPrecision(4)}`;
  }

  render(histogram: HistogramBlock | null, inFlight: boolean): void {
    this.histogram = histogram;
    this.updateTauLabel();
    const ctx = this.canvas.getContext("2d");
    if (!ctx) {
      return;
    }
    const w = this.canvas.width;
    const h = this.canvas.height;
    ctx.clearRect(0, 0, w, h);
    if (!histogram) {
      return;
    }
    const counts = histogram.counts;
    const top = Math.max(...counts, 1);
    const barW = w / counts.length;
    ctx.fillStyle = inFlight ? "#b5c8dd" : "#4682b4";
    counts.forEach((count, i) => {
      const barH = (count / top) * (h - 4);
      ctx.fillRect(i * barW, h - barH, Math.max(barW - 1, 1), barH);
    });
    // mark the current tau position in band-size space
    const idx = Number(this.tauSlider.value);
    const lo = histogram.edges[0];
    const hi = histogram.edges[histogram.edges.length - 1];
    if (idx < 100 && hi > lo) {
      const size = histogram.quantiles[idx];
      const x = ((size - lo) / (hi - lo)) * w;
      ctx.strokeStyle = "#d62728";
      ctx.beginPath();
      ctx.moveTo(x, 0);
      ctx.lineTo(x, h);
      ctx.stroke();
    }
  }
}
