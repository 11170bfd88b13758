/** Explorer bootstrap: wires the store, the service client, and the four
 * linked views. The service origin comes from the `?api=` query parameter
 * (defaults to the page origin). */

import { ApiClient, BuildInProgress } from "./api.js";
import { AttributePanel } from "./attributes.js";
import { HeatmapView } from "./heatmap.js";
import { HistogramView, tauFromSliderIndex } from "./histogram.js";
import { LayoutView } from "./layoutView.js";
import { selectionSet, SnapshotScheduler, Store } from "./state.js";

const DEBOUNCE_MS = 250;
const POLL_MS = 500;

export interface ExplorerApp {
  store: Store;
  scheduler: SnapshotScheduler;
  heatmap: HeatmapView;
  layout: LayoutView;
  histogram: HistogramView;
  attributes: AttributePanel;
  selectDataset: (id: string) => Promise<void>;
  refreshDatasetList: (selected?: string) => Promise<void>;
}

export function boot(root: Document = document, apiBase?: string): ExplorerApp {
  const params = new URLSearchParams(root.defaultView?.location.search ?? "");
  const api = new ApiClient(apiBase ?? params.get("api") ?? "");
  const store = new Store();

  const heatmapCanvas = root.getElementById("heatmap") as HTMLCanvasElement;
  const layoutCanvas = root.getElementById("layout") as HTMLCanvasElement;
  const histogramCanvas = root.getElementById("histogram") as HTMLCanvasElement;
  const controls = root.getElementById("controls")!;
  const attributeRoot = root.getElementById("attributes")!;
  const statusLine = root.getElementById("status")!;
  const hoverLine = root.getElementById("hover")!;
  const datasetSelect = root.getElementById("dataset-select") as HTMLSelectElement;
  const uploadInput = root.getElementById("dataset-upload") as HTMLInputElement;
  const kInput = root.getElementById("k-override") as HTMLInputElement;

  const scheduler = new SnapshotScheduler(DEBOUNCE_MS, (token) => {
    void fetchSnapshot(token);
  });

  async function fetchSnapshot(token: number): Promise<void> {
    const state = store.get();
    if (!state.datasetId) {
      return;
    }
    store.update({ requestInFlight: true, error: null });
    try {
      const { snapshot, etag } = await api.getSnapshot(
        state.datasetId, state.tau, state.kOverride);
      if (!scheduler.isLatest(token)) {
        return; // a newer request follows; never mix snapshots
      }
      store.update({ snapshot, snapshotTag: etag, requestInFlight: false,
                     buildProgress: null });
    } catch (err) {
      if (!scheduler.isLatest(token)) {
        return;
      }
      if (err instanceof BuildInProgress) {
        store.update({ buildProgress: err.progress });
        setTimeout(() => fetchSnapshot(token), POLL_MS);
        return;
      }
      store.update({ requestInFlight: false, error: String(err) });
    }
  }

  const heatmap = new HeatmapView(heatmapCanvas, {
    onHover: (info) => {
      hoverLine.textContent = info
        ? `(${info.i}, ${info.j}) similarity ${info.value.toFixed(3)}`
        : "";
    },
    onSelect: (index) => {
      const current = store.get().selectedPoint;
      store.update({ selectedPoint: current === index ? null : index, brush: null });
    },
  });

  const layout = new LayoutView(layoutCanvas, {
    onHover: (index) => {
      store.update({ hoveredPoint: index });
      const snap = store.get().snapshot;
      hoverLine.textContent = index !== null && snap
        ? `${layout.labelFor(index)} depth ${snap.depths[index].toFixed(3)}`
        : "";
    },
    onSelect: (index) => {
      const current = store.get().selectedPoint;
      store.update({ selectedPoint: current === index ? null : index, brush: null });
    },
  });

  const histogram = new HistogramView(histogramCanvas, controls, {
    onTauQuantile: (q) => {
      store.update({ tau: tauFromSliderIndex(q * 100), tauQuantileMirror: q });
      scheduler.request();
    },
    onEdgeThreshold: (threshold) => store.update({ edgeThreshold: threshold }),
  });

  const attributes = new AttributePanel(attributeRoot, {
    onBrush: (brush) => store.update({ brush, selectedPoint: null }),
  });

  kInput.addEventListener("change", () => {
    const v = kInput.value.trim();
    store.update({ kOverride: v ? Number(v) : null });
    scheduler.request();
  });

  datasetSelect.addEventListener("change", () => {
    if (datasetSelect.value) {
      void selectDataset(datasetSelect.value);
    }
  });

  uploadInput.addEventListener("change", async () => {
    const file = uploadInput.files?.[0];
    if (!file) {
      return;
    }
    const id = await api.uploadDataset(await file.text());
    await refreshDatasetList(id);
    void selectDataset(id);
  });

  async function refreshDatasetList(selected?: string): Promise<void> {
    const datasets = await api.listDatasets();
    datasetSelect.replaceChildren();
    const placeholder = root.createElement("option");
    placeholder.value = "";
    placeholder.textContent = "choose a dataset";
    datasetSelect.append(placeholder);
    for (const d of datasets) {
      const option = root.createElement("option");
      option.value = d.id;
      option.textContent = `${d.id} (n=${d.n}, ${d.status})`;
      datasetSelect.append(option);
    }
    if (selected) {
      datasetSelect.value = selected;
    }
  }

  async function selectDataset(id: string): Promise<void> {
    store.update({ datasetId: id, dataset: null, snapshot: null, snapshotTag: null,
                   selectedPoint: null, brush: null, hoveredPoint: null });
    const dataset = await api.getData(id);
    store.update({ dataset });
    layout.setLabels(dataset.labels ?? null);
    scheduler.requestNow();
  }

  store.subscribe((state) => {
    const selection = selectionSet(state);
    heatmap.render(state.snapshot, selection);
    layout.render(state.snapshot, state.edgeThreshold, selection, state.hoveredPoint);
    histogram.render(state.snapshot?.histogram ?? null, state.requestInFlight);
    attributes.render(state.snapshot, state.dataset, state.brush, state.hoveredPoint);
    const bits: string[] = [];
    if (state.buildProgress !== null) {
      bits.push(`building inclusion matrix: ${(state.buildProgress * 100).toFixed(0)}%`);
    }
    if (state.requestInFlight) {
      bits.push("fetching snapshot…");
    }
    if (state.snapshot) {
      const tau = state.snapshot.tau === null ? "∞" : state.snapshot.tau.toPrecision(4);
      bits.push(`n=${state.snapshot.n} bands=${state.snapshot.band_count} ` +
                `tau=${tau} k=${state.snapshot.k} (suggested ${state.snapshot.spectral.suggested_k})`);
    }
    if (state.snapshotTag) {
      bits.push(`snapshot ${state.snapshotTag.replaceAll('"', "").slice(0, 12)}`);
    }
    if (state.error) {
      bits.push(`error: ${state.error}`);
    }
    statusLine.textContent = bits.join("  ·  ");
  });

  void refreshDatasetList();
  return { store, scheduler, heatmap, layout, histogram, attributes,
           selectDataset, refreshDatasetList };
}

if (typeof document !== "undefined" && document.getElementById("heatmap")) {
  boot();
}
