/** Attribute panel: stacked bars for categorical attributes (segments colored
 * by the shared depth-bin scale), five-number summaries for numeric kinds.
 * Brushing is bidirectional: hovering a node highlights its category cells,
 * and clicking a category bar brushes every datapoint holding that value. */

import { DEPTH_COLORS } from "./color.js";
import type { Brush } from "./state.js";
import type { AttributeSummary, DatasetJson, Snapshot } from "./types.js";

export interface AttributeCallbacks {
  onBrush?: (brush: Brush | null) => void;
}

/** Labels held by one datapoint, per categorical attribute. */
export function categoriesOfPoint(dataset: DatasetJson, pointIndex: number):
    Map<string, string[]> {
  const out = new Map<string, string[]>();
  dataset.schema.forEach((entry, column) => {
    if (entry.kind !== "categorical_set") {
      return;
    }
    const cell = dataset.rows[pointIndex]?.[column];
    out.set(entry.name, Array.isArray(cell) ? (cell as string[]) : []);
  });
  return out;
}

export class AttributePanel {
  private brush: Brush | null = null;

  constructor(private readonly root: HTMLElement,
              private readonly callbacks: AttributeCallbacks = {}) {}

  render(snapshot: Snapshot | null, dataset: DatasetJson | null,
         brush: Brush | null, hovered: number | null): void {
    this.brush = brush;
    this.root.replaceChildren();
    if (!snapshot) {
      return;
    }
    const hoveredCategories = hovered !== null && dataset
      ? categoriesOfPoint(dataset, hovered)
      : new Map<string, string[]>();
    for (const summary of snapshot.summaries) {
      this.root.append(this.renderSummary(summary, hoveredCategories));
    }
  }

  private renderSummary(summary: AttributeSummary,
                        hoveredCategories: Map<string, string[]>): HTMLElement {
    const box = document.createElement("div");
    box.className = "attribute";
    const title = document.createElement("div");
    title.className = "attribute-name";
    title.textContent = summary.name;
    box.append(title);
    if (summary.kind === "categorical_set" && summary.stacked) {
      box.append(this.renderStacked(summary, hoveredCategories.get(summary.name) ?? []));
    } else if (summary.five_num) {
      const [lo, q1, med, q3, hi] = summary.five_num;
      const line = document.createElement("div");
      line.className = "five-num";
      line.textContent =
        `min ${fmt(lo)}  q1 ${fmt(q1)}  med ${fmt(med)}  q3 ${fmt(q3)}  max ${fmt(hi)}`
        + (summary.outliers?.length ? `  (${summary.outliers.length} outliers)` : "");
      box.append(line);
    } else if (summary.pointwise) {
      const line = document.createElement("div");
      line.className = "five-num";
      line.textContent = `${summary.pointwise.length} pointwise five-number summaries`;
      box.append(line);
    }
    return box;
  }

  private renderStacked(summary: AttributeSummary, hoveredLabels: string[]): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "stacked";
    const total = Math.max(
      ...Object.values(summary.stacked!).map((counts) => counts.reduce((a, b) => a + b, 0)),
      1);
    for (const [label, counts] of Object.entries(summary.stacked!)) {
      const row = document.createElement("div");
      row.className = "stacked-row";
      row.dataset.attribute = summary.name;
      row.dataset.label = label;
      const isBrushed = this.brush?.attribute === summary.name && this.brush?.label === label;
      if (isBrushed) {
        row.classList.add("brushed");
      }
      if (hoveredLabels.includes(label)) {
        row.classList.add("hovered-value");
      }
      const name = document.createElement("span");
      name.className = "stacked-label";
      name.textContent = label;
      const bar = document.createElement("span");
      bar.className = "stacked-bar";
      counts.forEach((count, bin) => {
        const seg = document.createElement("span");
        seg.className = "stacked-seg";
        seg.style.backgroundColor = DEPTH_COLORS[bin];
        seg.style.width = `${(count / total) * 100}%`;
        seg.dataset.bin = String(bin);
        seg.dataset.count = String(count);
        bar.append(seg);
      });
      row.append(name, bar);
      row.addEventListener("click", () => {
        const next = isBrushed ? null : { attribute: summary.name, label };
        this.callbacks.onBrush?.(next);
      });
      wrap.append(row);
    }
    return wrap;
  }
}

function fmt(v: number): string {
  return Math.abs(v) >= 1000 || (v !== 0 && Math.abs(v) < 0.01)
    ? v.toExponential(2)
    : v.toPrecision(4);
}
