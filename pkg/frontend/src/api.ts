/** Typed client for the analysis service. The explorer talks to the service
 * exclusively through these endpoints. */

import type { DatasetJson, DatasetStatus, HistogramBlock, Snapshot, TauParam } from "./types.js";

export class BuildInProgress extends Error {
  constructor(public readonly progress: number) {
    super(`inclusion matrix building: ${Math.round(progress * 100)}%`);
  }
}

export class ApiError extends Error {
  constructor(public readonly status: number, message: string) {
    super(message);
  }
}

export function tauQuery(tau: TauParam): string {
  switch (tau.kind) {
    case "absolute":
      return `tau=${encodeURIComponent(String(tau.value))}`;
    case "quantile":
      return `tau=q:${encodeURIComponent(String(tau.q))}`;
    case "unrestricted":
      return "";
  }
}

export interface SnapshotResult {
  snapshot: Snapshot;
  etag: string | null;
}

export class ApiClient {
  constructor(private readonly baseUrl: string,
              private readonly fetchFn: typeof fetch = fetch) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`);
    if (response.status === 409) {
      const body = (await response.json()) as { progress?: number };
      throw new BuildInProgress(body.progress ?? 0);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        detail = ((await response.json()) as { error?: string }).error ?? detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  async listDatasets(): Promise<DatasetStatus[]> {
    const body = await this.getJson<{ datasets: DatasetStatus[] }>("/api/datasets");
    return body.datasets;
  }

  async datasetStatus(id: string): Promise<DatasetStatus> {
    return this.getJson<DatasetStatus>(`/api/datasets/${id}`);
  }

  async uploadDataset(data: string | Blob): Promise<string> {
    const response = await this.fetchFn(`${this.baseUrl}/api/datasets`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: data,
    });
    if (!response.ok) {
      throw new ApiError(response.status, ((await response.json()) as { error?: string }).error ?? "upload failed");
    }
    return ((await response.json()) as { id: string }).id;
  }

  async getData(id: string): Promise<DatasetJson> {
    return this.getJson<DatasetJson>(`/api/datasets/${id}/data`);
  }

  async getHistogram(id: string): Promise<HistogramBlock & { band_count: number }> {
    return this.getJson(`/api/datasets/${id}/histogram`);
  }

  async getSnapshot(id: string, tau: TauParam, k: number | null = null,
                    seed: number | null = null): Promise<SnapshotResult> {
    const params = [tauQuery(tau)];
    if (k !== null) params.push(`k=${k}`);
    if (seed !== null) params.push(`seed=${seed}`);
    const query = params.filter((p) => p.length > 0).join("&");
    const url = `${this.baseUrl}/api/datasets/${id}/snapshot${query ? "?" + query : ""}`;
    const response = await this.fetchFn(url);
    if (response.status === 409) {
      const body = (await response.json()) as { progress?: number };
      throw new BuildInProgress(body.progress ?? 0);
    }
    if (!response.ok) {
      throw new ApiError(response.status, response.statusText);
    }
    const snapshot = (await response.json()) as Snapshot;
    return { snapshot, etag: response.headers.get("ETag") };
  }
}
