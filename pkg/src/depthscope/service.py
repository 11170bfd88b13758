"""HTTP API over immutable analysis snapshots.

Content-addressed dataset uploads, asynchronous inclusion-matrix builds with
polled progress, and per-tau snapshot endpoints with ETag caching. All state
lives in AnalysisSessions; any sequence of GETs is side-effect free. The only
persistence is the data directory: uploaded datasets and inclusion-matrix
binaries are stored there and reloaded on startup.

The wire format is JSON under /api; CORS is open so the explorer UI can be
served from any origin. An OpenAPI description ships in the repo
(openapi.yaml).
"""

from __future__ import annotations

import json
import threading
from hashlib import sha256
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .dataset import Dataset, dataset_content_id, parse_dataset, serialize_dataset
from .errors import AnalysisError, DepthscopeError, IngestError
from .pipeline import AnalysisSession, AnalyzeConfig, serialize_snapshot
from .similarity import similarity_to_json_obj

DEFAULT_MAX_UPLOAD = 32 * 1024 * 1024


class DatasetEntry:
    def __init__(self, dataset_id: str, dataset: Dataset, session: AnalysisSession):
        self.dataset_id = dataset_id
        self.dataset = dataset
        self.session = session
        self.error: str | None = None

    @property
    def status(self) -> str:
        if self.error:
            return "error"
        return "ready" if self.session.built else "building"

    def status_obj(self) -> dict:
        out = {
            "id": self.dataset_id,
            "status": self.status,
            "progress": round(float(self.session.progress), 4),
            "n": self.dataset.n,
        }
        if self.error:
            out["error"] = self.error
        if self.session.built:
            out["band_count"] = self.session.matrix.band_count
        return out


class ServiceState:
    """id -> entry map with deduplicated background builds."""

    def __init__(self, data_dir: Path | None = None,
                 max_upload: int = DEFAULT_MAX_UPLOAD,
                 budget: int | None = None):
        self.data_dir = Path(data_dir) if data_dir else None
        self.max_upload = max_upload
        self.budget = budget
        self._entries: dict[str, DatasetEntry] = {}
        self._lock = threading.Lock()
        if self.data_dir and self.data_dir.is_dir():
            for path in sorted(self.data_dir.glob("*.dataset.json")):
                try:
                    self._register(parse_dataset(path.read_bytes()), persist=False)
                except DepthscopeError:
                    continue

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._entries)

    def get(self, dataset_id: str) -> DatasetEntry | None:
        with self._lock:
            return self._entries.get(dataset_id)

    def add_dataset(self, dataset: Dataset) -> tuple[str, bool]:
        """Returns (content id, created). Duplicate uploads are a no-op."""
        return self._register(dataset, persist=True)

    def _register(self, dataset: Dataset, persist: bool) -> tuple[str, bool]:
        dataset_id = dataset_content_id(dataset)
        with self._lock:
            if dataset_id in self._entries:
                return dataset_id, False
            session = AnalysisSession(dataset, budget=self.budget,
                                      cache_dir=self.data_dir)
            entry = DatasetEntry(dataset_id, dataset, session)
            self._entries[dataset_id] = entry
        if persist and self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            (self.data_dir / f"{dataset_id}.dataset.json").write_bytes(
                serialize_dataset(dataset))

        def build() -> None:
            try:
                entry.session.ensure_built()
            except DepthscopeError as e:
                entry.error = str(e)

        threading.Thread(target=build, name=f"build-{dataset_id}", daemon=True).start()
        return dataset_id, True


def _parse_tau_params(query: dict) -> AnalyzeConfig:
    tau = None
    tau_quantile = None
    raw = query.get("tau", [None])[0]
    if raw is not None:
        if raw.startswith("q:"):
            tau_quantile = float(raw[2:])
            if not 0.0 <= tau_quantile <= 1.0:
                raise ValueError(f"tau quantile must be in [0, 1], got {tau_quantile}")
        else:
            tau = float(raw)
            if tau < 0:
                raise ValueError("tau must be nonnegative")
    k = query.get("k", [None])[0]
    seed = query.get("seed", [None])[0]
    return AnalyzeConfig(tau=tau, tau_quantile=tau_quantile,
                         k=int(k) if k is not None else None,
                         seed=int(seed) if seed is not None else 0)


class ApiHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    state: ServiceState  # injected by make_server

    # -- plumbing ----------------------------------------------------------

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type, If-None-Match")
        self.send_header("Access-Control-Expose-Headers", "ETag")

    def _send(self, code: int, body: bytes, content_type: str = "application/json",
              etag: str | None = None) -> None:
        self.send_response(code)
        self._cors()
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        if etag:
            self.send_header("ETag", etag)
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, code: int, obj, etag: str | None = None) -> None:
        self._send(code, json.dumps(obj, sort_keys=True).encode(), etag=etag)

    def _send_error(self, code: int, message: str) -> None:
        self._send_json(code, {"error": message})

    def _send_cached(self, body: bytes) -> None:
        etag = '"' + sha256(body).hexdigest()[:32] + '"'
        if self.headers.get("If-None-Match") == etag:
            self.send_response(304)
            self._cors()
            self.send_header("ETag", etag)
            self.send_header("Content-Length", "0")
            self.end_headers()
            return
        self._send(200, body, etag=etag)

    # -- routes ------------------------------------------------------------

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_POST(self) -> None:
        parsed = urlparse(self.path)
        if parsed.path.rstrip("/") != "/api/datasets":
            self._send_error(404, "unknown endpoint")
            return
        length = int(self.headers.get("Content-Length", "0"))
        if length > self.state.max_upload:
            self._send_error(413, f"dataset exceeds upload limit of {self.state.max_upload} bytes")
            return
        body = self.rfile.read(length)
        try:
            dataset = parse_dataset(body)
        except IngestError as e:
            self._send_error(400, str(e))
            return
        dataset_id, created = self.state.add_dataset(dataset)
        self._send_json(201 if created else 200, {"id": dataset_id})

    def do_GET(self) -> None:
        parsed = urlparse(self.path)
        query = parse_qs(parsed.query)
        parts = [p for p in parsed.path.split("/") if p]
        try:
            if parts[:2] != ["api", "datasets"]:
                self._send_error(404, "unknown endpoint")
            elif len(parts) == 2:
                self._send_json(200, {"datasets": [
                    self.state.get(i).status_obj() for i in self.state.ids()]})
            elif len(parts) == 3:
                self._entry_status(parts[2])
            elif len(parts) == 4:
                self._component(parts[2], parts[3], query)
            else:
                self._send_error(404, "unknown endpoint")
        except BrokenPipeError:  # client went away mid-response
            pass

    def _entry_status(self, dataset_id: str) -> None:
        entry = self.state.get(dataset_id)
        if entry is None:
            self._send_error(404, f"unknown dataset {dataset_id}")
            return
        self._send_json(200, entry.status_obj())

    def _ready_entry(self, dataset_id: str) -> DatasetEntry | None:
        entry = self.state.get(dataset_id)
        if entry is None:
            self._send_error(404, f"unknown dataset {dataset_id}")
            return None
        if entry.error:
            self._send_error(500, entry.error)
            return None
        if not entry.session.built:
            self._send_json(409, {"status": "building",
                                  "progress": round(float(entry.session.progress), 4)})
            return None
        return entry

    def _component(self, dataset_id: str, component: str, query: dict) -> None:
        if component == "data":
            # raw dataset for client-side brushing; available before the build
            entry = self.state.get(dataset_id)
            if entry is None:
                self._send_error(404, f"unknown dataset {dataset_id}")
                return
            self._send_cached(serialize_dataset(entry.dataset))
            return
        entry = self._ready_entry(dataset_id)
        if entry is None:
            return
        try:
            config = _parse_tau_params(query)
        except ValueError as e:
            self._send_error(400, str(e))
            return
        try:
            if component == "snapshot":
                snap = entry.session.snapshot(config)
                self._send_cached(serialize_snapshot(snap))
            elif component == "histogram":
                snap_obj = self._histogram_obj(entry)
                self._send_cached(json.dumps(snap_obj, sort_keys=True,
                                             separators=(",", ":")).encode())
            elif component == "similarity":
                snap = entry.session.snapshot(config)
                obj = similarity_to_json_obj(snap.similarity, snap.spectral.order)
                self._send_cached(json.dumps(obj, sort_keys=True,
                                             separators=(",", ":")).encode())
            elif component == "summaries":
                snap = entry.session.snapshot(config)
                obj = {"tau": snap.tau,
                       "coloring": [int(b) for b in snap.coloring.bins],
                       "summaries": [s.to_json_obj() for s in snap.summaries]}
                self._send_cached(json.dumps(obj, sort_keys=True,
                                             separators=(",", ":")).encode())
            else:
                self._send_error(404, f"unknown component {component}")
        except AnalysisError as e:
            self._send_error(400, str(e))

    def _histogram_obj(self, entry: DatasetEntry) -> dict:
        from .stats import band_size_histogram
        matrix = entry.session.matrix
        hist = band_size_histogram(matrix.band_sizes)
        return {
            "band_count": matrix.band_count,
            "edges": [float(v) for v in hist.edges],
            "counts": [int(v) for v in hist.counts],
            "quantiles": [float(v) for v in hist.quantiles],
        }


def make_server(port: int = 0, data_dir: Path | None = None,
                budget: int | None = None,
                max_upload: int = DEFAULT_MAX_UPLOAD) -> ThreadingHTTPServer:
    state = ServiceState(data_dir=data_dir, max_upload=max_upload, budget=budget)
    handler = type("BoundApiHandler", (ApiHandler,), {"state": state})
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def run_service(port: int, data_dir: Path | None = None,
                budget: int | None = None, announce: bool = False) -> None:
    server = make_server(port=port, data_dir=data_dir, budget=budget)
    if announce:
        print(f"depthscope service listening on http://127.0.0.1:{server.server_address[1]}",
              flush=True)
    try:
        server.serve_forever()
    finally:
        server.server_close()
