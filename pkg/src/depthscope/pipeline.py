"""Orchestration: dataset -> bands -> inclusion matrix -> per-tau snapshot.

The inclusion matrix is the expensive, tau-independent part; an
AnalysisSession holds it (optionally persisted under a cache directory) and
serves immutable AnalysisSnapshots per (tau, k, seed). Retuning tau reuses the
matrix and reruns only masking-onward stages, which is what makes the
interactive tau slider viable.

Snapshot JSON is canonical: keys sorted, no whitespace, floats in shortest
round-trip form. Stage timings are tracked on the snapshot object but kept out
of the serialized form so identical configs serialize byte-identically.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from hashlib import sha256
from pathlib import Path
from typing import Any

import numpy as np

from . import bands, layout as layout_mod, signatures, similarity as similarity_mod, spectral as spectral_mod, stats
from .dataset import Dataset, Kind, dataset_content_id
from .errors import AnalysisError

SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class AnalyzeConfig:
    """Per-snapshot knobs. tau as an absolute band size or a band-size
    quantile; when neither is given the mask is wide open (tau = +inf)."""

    budget: int | None = None
    seed: int = 0
    tau: float | None = None
    tau_quantile: float | None = None
    k: int | None = None
    layout_mode: str = "auto"          # auto | force | geospatial
    geo_attribute: str | None = None
    eigensolver: str = "auto"

    def validate(self) -> None:
        if self.tau is not None and self.tau_quantile is not None:
            raise AnalysisError("config", "give either tau or tau-quantile, not both")
        if self.tau is not None and not (self.tau >= 0.0):
            raise AnalysisError("config", "tau must be nonnegative")
        if self.tau_quantile is not None and not 0.0 <= self.tau_quantile <= 1.0:
            raise AnalysisError("config", "tau quantile must be in [0, 1]")
        if self.layout_mode not in ("auto", "force", "geospatial"):
            raise AnalysisError("config", f"unknown layout mode {self.layout_mode!r}")


@dataclass(eq=False)
class AnalysisSnapshot:
    dataset_id: str
    tau: float
    tau_quantile: float | None
    k: int
    seed: int
    depths: np.ndarray
    coloring: stats.DepthColoring
    outliers: stats.OutlierFlags
    similarity: similarity_mod.SimilarityMatrix
    spectral: spectral_mod.SpectralResult
    layout: layout_mod.LayoutResult
    collision_passes: int
    histogram: stats.BandSizeHistogram
    summaries: list[stats.AttributeSummary]
    band_count: int
    timings_ms: dict[str, float] = field(default_factory=dict)

    def to_json_obj(self) -> dict[str, Any]:
        lay: dict[str, Any] = {
            "mode": self.layout.mode,
            "iterations": self.layout.iterations,
            "energy": float(self.layout.energy),
            "positions": [[float(x), float(y)] for x, y in self.layout.positions],
            "isolated": [int(i) for i in self.layout.isolated],
            "collision_passes": self.collision_passes,
        }
        if self.layout.polylines is not None:
            lay["polylines"] = [[[float(c) for c in step] for step in line]
                                for line in self.layout.polylines]
        return {
            "snapshot_version": SNAPSHOT_VERSION,
            "dataset_id": self.dataset_id,
            "n": int(self.depths.size),
            "band_count": self.band_count,
            "unmasked_band_count": self.similarity.unmasked_band_count,
            "tau": similarity_mod.tau_json(self.tau),
            "tau_quantile": self.tau_quantile,
            "k": self.k,
            "seed": self.seed,
            "depths": [float(v) for v in self.depths],
            "coloring": {
                "bins": [int(b) for b in self.coloring.bins],
                "thresholds": [float(t) for t in self.coloring.thresholds],
            },
            "outliers": {
                "flags": [bool(v) for v in self.outliers.is_outlier],
                "lower_fence": float(self.outliers.lower_fence),
            },
            "similarity": similarity_mod.similarity_to_json_obj(
                self.similarity, self.spectral.order),
            "spectral": self.spectral.to_json_obj(),
            "layout": lay,
            "histogram": {
                "edges": [float(v) for v in self.histogram.edges],
                "counts": [int(v) for v in self.histogram.counts],
                "quantiles": [float(v) for v in self.histogram.quantiles],
                "log_scale": self.histogram.log_scale,
            },
            "summaries": [s.to_json_obj() for s in self.summaries],
        }


def serialize_snapshot(snapshot: AnalysisSnapshot) -> bytes:
    return json.dumps(snapshot.to_json_obj(), sort_keys=True,
                      separators=(",", ":")).encode()


def snapshot_hash(snapshot: AnalysisSnapshot) -> str:
    return sha256(serialize_snapshot(snapshot)).hexdigest()[:32]


def _geo_attribute(dataset: Dataset) -> str | None:
    for s in dataset.schema:
        if s.kind is Kind.CURVE and s.dim == 2:
            return s.name
    for s in dataset.schema:
        if s.kind is Kind.POINT and s.dim == 2:
            return s.name
    return None


class AnalysisSession:
    """Expensive tau-independent state for one (dataset, budget, seed).

    Thread-safe: the inclusion matrix is built exactly once (idempotent under
    concurrent callers) and snapshots are cached per configuration with
    single-writer insertion.
    """

    def __init__(self, dataset: Dataset, budget: int | None = None, seed: int = 0,
                 cache_dir: Path | None = None):
        self.dataset = dataset
        self.budget = bands.DEFAULT_BAND_BUDGET if budget is None else int(budget)
        self.seed = int(seed)
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.progress = 0.0
        self.error: str | None = None
        self._matrix: signatures.InclusionMatrix | None = None
        self._plan: bands.BandPlan | None = None
        self._build_lock = threading.Lock()
        self._snap_lock = threading.Lock()
        self._snapshots: dict[tuple, AnalysisSnapshot] = {}
        self.timings_ms: dict[str, float] = {}

    @property
    def cache_key(self) -> str:
        return f"{dataset_content_id(self.dataset)}-b{self.budget}-s{self.seed}"

    @property
    def built(self) -> bool:
        return self._matrix is not None

    def _disk_paths(self) -> tuple[Path, Path] | None:
        if self.cache_dir is None:
            return None
        base = self.cache_dir / self.cache_key
        return base.with_suffix(".bisig"), base.with_suffix(".bisig.plan.json")

    def ensure_built(self) -> signatures.InclusionMatrix:
        if self._matrix is not None:
            return self._matrix
        with self._build_lock:
            if self._matrix is not None:
                return self._matrix
            t0 = time.perf_counter()
            paths = self._disk_paths()
            if paths and paths[0].exists() and paths[1].exists():
                self._matrix = signatures.read_inclusion_matrix(paths[0], paths[1])
                self._plan = self._matrix.plan
                self.progress = 1.0
                self.timings_ms["inclusion"] = (time.perf_counter() - t0) * 1000.0
                return self._matrix
            self._plan = bands.plan_bands(self.dataset, self.budget, self.seed)
            self.timings_ms["plan"] = (time.perf_counter() - t0) * 1000.0
            t1 = time.perf_counter()

            def _progress(frac: float) -> None:
                self.progress = frac

            matrix = signatures.build_inclusion_matrix(self.dataset, self._plan,
                                                       progress=_progress)
            self.timings_ms["inclusion"] = (time.perf_counter() - t1) * 1000.0
            if paths:
                self.cache_dir.mkdir(parents=True, exist_ok=True)
                signatures.write_inclusion_matrix(matrix, paths[0], paths[1])
            self._matrix = matrix
            return matrix

    @property
    def matrix(self) -> signatures.InclusionMatrix:
        return self.ensure_built()

    def resolve_tau(self, config: AnalyzeConfig) -> float:
        if config.tau is not None:
            return float(config.tau)
        if config.tau_quantile is not None:
            return signatures.tau_from_quantile(self.matrix, config.tau_quantile)
        return float("inf")

    def snapshot(self, config: AnalyzeConfig) -> AnalysisSnapshot:
        """Per-tau snapshot; reuses the cached inclusion matrix and the
        per-config snapshot cache."""
        config.validate()
        matrix = self.ensure_built()
        tau = self.resolve_tau(config)
        key = (tau, config.k, config.seed, config.layout_mode, config.geo_attribute,
               config.eigensolver)
        snap = self._snapshots.get(key)
        if snap is not None:
            return snap
        snap = _compute_snapshot(self.dataset, matrix, config, tau)
        snap.timings_ms.update({k: v for k, v in self.timings_ms.items()
                                if k in ("plan", "inclusion")})
        with self._snap_lock:
            self._snapshots.setdefault(key, snap)
        return self._snapshots[key]


def _compute_snapshot(dataset: Dataset, matrix: signatures.InclusionMatrix,
                      config: AnalyzeConfig, tau: float) -> AnalysisSnapshot:
    timings: dict[str, float] = {}

    def tick(stage: str, t0: float) -> float:
        t1 = time.perf_counter()
        timings[stage] = (t1 - t0) * 1000.0
        return t1

    try:
        t = time.perf_counter()
        masked = signatures.mask_by_tau(matrix, tau)
        t = tick("mask", t)
        depths = signatures.depth_values(masked)
        t = tick("depths", t)
        sim = similarity_mod.similarity_matrix(masked)
        t = tick("similarity", t)
        spectral = spectral_mod.spectral_analysis(sim, k=config.k, seed=config.seed,
                                                  method=config.eigensolver)
        t = tick("spectral", t)
        coloring = stats.color_bins(depths)
        outliers = stats.tukey_outliers(depths)
        histogram = stats.band_size_histogram(matrix.band_sizes)
        summaries = stats.attribute_summaries(dataset, coloring)
        t = tick("stats", t)

        mode = config.layout_mode
        geo_attr = config.geo_attribute or _geo_attribute(dataset)
        if mode == "auto":
            mode = "geospatial" if geo_attr else "force"
        if mode == "geospatial":
            if geo_attr is None:
                raise AnalysisError("layout", "no positional attribute for geospatial layout")
            lay = layout_mod.geospatial_positions(dataset, geo_attr)
            collision_passes = 0
        else:
            lay = layout_mod.force_layout(sim, seed=config.seed)
            active = [i for i in range(dataset.n) if i not in set(lay.isolated)]
            collision_passes = 0
            if len(active) > 1:
                radius = layout_mod.default_node_radius(dataset.n)
                collided = layout_mod.resolve_collisions(
                    lay.positions[active], radius, seed=config.seed)
                positions = lay.positions.copy()
                positions[active] = collided.positions
                lay = replace_positions(lay, positions)
                collision_passes = collided.passes
        tick("layout", t)
    except AnalysisError:
        raise
    except Exception as e:  # pragma: no cover - defensive stage attribution
        raise AnalysisError("snapshot", str(e)) from e

    return AnalysisSnapshot(
        dataset_id=dataset.id,
        tau=tau,
        tau_quantile=config.tau_quantile,
        k=spectral.k,
        seed=config.seed,
        depths=depths,
        coloring=coloring,
        outliers=outliers,
        similarity=sim,
        spectral=spectral,
        layout=lay,
        collision_passes=collision_passes,
        histogram=histogram,
        summaries=summaries,
        band_count=matrix.band_count,
        timings_ms=timings,
    )


def replace_positions(lay: layout_mod.LayoutResult, positions: np.ndarray) -> layout_mod.LayoutResult:
    return layout_mod.LayoutResult(positions=positions, mode=lay.mode,
                                   iterations=lay.iterations, energy=lay.energy,
                                   polylines=lay.polylines, isolated=lay.isolated)


def analyze(dataset: Dataset, config: AnalyzeConfig = AnalyzeConfig(),
            session: AnalysisSession | None = None,
            cache_dir: Path | None = None) -> AnalysisSnapshot:
    """One-shot analysis. Pass a session to reuse the inclusion matrix across
    tau values; otherwise a fresh session is created (and discarded)."""
    config.validate()
    if session is None:
        session = AnalysisSession(dataset, budget=config.budget, seed=config.seed,
                                  cache_dir=cache_dir)
    snap = session.snapshot(config)
    merged = {**session.timings_ms, **snap.timings_ms}
    snap.timings_ms["total"] = sum(v for k, v in merged.items() if k != "total")
    return snap


def retune(session: AnalysisSession, config: AnalyzeConfig) -> AnalysisSnapshot:
    """Re-run masking-onward stages at a new tau; the inclusion matrix and the
    band plan are reused from the session."""
    return session.snapshot(config)
