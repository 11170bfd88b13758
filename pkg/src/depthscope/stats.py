"""Depth-derived statistics: color bins, outlier flags, histograms, summaries.

Quantiles use linear interpolation at position (n-1)*p throughout (numpy's
default), which reproduces the usual boxplot quartiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset, Kind
from .errors import AnalysisError

_BIN_FRACTIONS = (0.2, 0.4, 0.8)  # cumulative rank cuts; the rest is bin 3


@dataclass(eq=False)
class DepthColoring:
    """Four depth-rank bins per datapoint; bin 0 is the most central 20%."""

    bins: np.ndarray       # (n,) int in {0, 1, 2, 3}
    thresholds: tuple[float, float, float]  # depth of the weakest member of bins 0..2

    def counts(self) -> list[int]:
        return np.bincount(self.bins, minlength=4).tolist()


@dataclass(eq=False)
class OutlierFlags:
    is_outlier: np.ndarray  # (n,) bool
    lower_fence: float


@dataclass(eq=False)
class BandSizeHistogram:
    edges: np.ndarray       # (bins+1,)
    counts: np.ndarray      # (bins,)
    quantiles: np.ndarray   # (101,) band size at q = 0.00 .. 1.00, slider snap points
    log_scale: bool


def color_bins(depths: np.ndarray) -> DepthColoring:
    """Rank-based cut at ceil(0.2n)/ceil(0.4n)/ceil(0.8n); ties break by index."""
    depths = np.asarray(depths, dtype=float)
    n = depths.size
    if n < 5:
        raise AnalysisError("stats", f"depth coloring needs at least 5 datapoints, got {n}")
    order = sorted(range(n), key=lambda i: (-depths[i], i))
    cuts = [math.ceil(f * n) for f in _BIN_FRACTIONS]
    bins = np.empty(n, dtype=np.int64)
    for rank, i in enumerate(order):
        if rank < cuts[0]:
            bins[i] = 0
        elif rank < cuts[1]:
            bins[i] = 1
        elif rank < cuts[2]:
            bins[i] = 2
        else:
            bins[i] = 3
    thresholds = tuple(float(depths[order[c - 1]]) for c in cuts)
    return DepthColoring(bins=bins, thresholds=thresholds)  # type: ignore[arg-type]


def tukey_outliers(depths: np.ndarray) -> OutlierFlags:
    """Flag depth < Q1 - 1.5*IQR, and always flag zero depth."""
    depths = np.asarray(depths, dtype=float)
    if depths.size < 4:
        raise AnalysisError("stats", f"outlier fences need at least 4 datapoints, got {depths.size}")
    q1, q3 = np.quantile(depths, [0.25, 0.75])
    fence = float(q1 - 1.5 * (q3 - q1))
    flags = (depths < fence) | (depths == 0.0)
    return OutlierFlags(is_outlier=flags, lower_fence=fence)


def band_size_histogram(band_sizes: np.ndarray, bins: int = 50,
                        log_scale: bool = False) -> BandSizeHistogram:
    """Equal-width histogram of band sizes plus slider snap quantiles.

    Non-finite sizes (overflowed curve products) are clamped to the largest
    finite value for binning so counts still sum to the band count.
    """
    sizes = np.asarray(band_sizes, dtype=float)
    if sizes.size == 0:
        raise AnalysisError("stats", "histogram needs at least one band")
    finite = sizes[np.isfinite(sizes)]
    top = float(finite.max()) if finite.size else 1.0
    clamped = np.where(np.isfinite(sizes), sizes, top)
    if log_scale:
        positive = clamped[clamped > 0]
        if positive.size == 0:
            raise AnalysisError("stats", "log-scale histogram needs a positive band size")
        lo = float(positive.min())
        edges = np.logspace(np.log10(lo), np.log10(max(top, lo * (1 + 1e-12))), bins + 1)
        counts, edges = np.histogram(np.maximum(clamped, lo), bins=edges)
    else:
        counts, edges = np.histogram(clamped, bins=bins)
    quantiles = np.quantile(clamped, np.linspace(0.0, 1.0, 101))
    return BandSizeHistogram(edges=edges, counts=counts,
                             quantiles=quantiles, log_scale=log_scale)


def five_number(values: np.ndarray) -> list[float]:
    q = np.quantile(np.asarray(values, dtype=float), [0.0, 0.25, 0.5, 0.75, 1.0])
    return [float(v) for v in q]


def _boxplot_outlier_indices(values: np.ndarray) -> list[int]:
    v = np.asarray(values, dtype=float)
    q1, q3 = np.quantile(v, [0.25, 0.75])
    iqr = q3 - q1
    out = (v < q1 - 1.5 * iqr) | (v > q3 + 1.5 * iqr)
    return [int(i) for i in np.nonzero(out)[0]]


@dataclass(eq=False)
class AttributeSummary:
    name: str
    kind: Kind
    # categorical: per-category counts stratified by color bin
    stacked: dict[str, list[int]] | None = None
    # scalar: five-number summary + boxplot outlier indices
    five_num: list[float] | None = None
    outlier_indices: list[int] | None = None
    # function/curve/point: per-sample (and per-dimension) five-number summaries
    pointwise: list | None = None

    def to_json_obj(self) -> dict:
        out: dict = {"name": self.name, "kind": self.kind.value}
        if self.stacked is not None:
            out["stacked"] = self.stacked
        if self.five_num is not None:
            out["five_num"] = self.five_num
            out["outliers"] = self.outlier_indices
        if self.pointwise is not None:
            out["pointwise"] = self.pointwise
        return out


def attribute_summaries(dataset: Dataset, coloring: DepthColoring) -> list[AttributeSummary]:
    """Per-attribute view models for the attribute panel.

    Categorical sets become stacked-bar counts per category, stratified by the
    depth-color bin (a point holding several categories counts once per
    category). Numeric kinds get five-number summaries: scalars over rows,
    functions per grid sample, points and curves per coordinate.
    """
    out = []
    for a, schema in enumerate(dataset.schema):
        col = dataset.column(a)
        if schema.kind is Kind.CATEGORICAL_SET:
            stacked: dict[str, list[int]] = {label: [0, 0, 0, 0] for label in schema.universe}
            for i, row in enumerate(dataset.points):
                for label in row[a]:  # type: ignore[union-attr]
                    stacked[label][int(coloring.bins[i])] += 1
            out.append(AttributeSummary(schema.name, schema.kind, stacked=stacked))
        elif schema.kind is Kind.SCALAR:
            out.append(AttributeSummary(schema.name, schema.kind,
                                        five_num=five_number(col),
                                        outlier_indices=_boxplot_outlier_indices(col)))
        elif schema.kind is Kind.POINT:
            pointwise = [five_number(col[:, d]) for d in range(schema.dim)]
            out.append(AttributeSummary(schema.name, schema.kind, pointwise=pointwise))
        elif schema.kind is Kind.FUNCTION:
            pointwise = [five_number(col[:, g]) for g in range(len(schema.grid))]
            out.append(AttributeSummary(schema.name, schema.kind, pointwise=pointwise))
        else:  # curve: per time point, per dimension
            pointwise = [[five_number(col[:, t, d]) for d in range(schema.dim)]
                         for t in range(schema.time_points)]
            out.append(AttributeSummary(schema.name, schema.kind, pointwise=pointwise))
    return out


def rankdata(values: Sequence[float]) -> np.ndarray:
    """Average ranks (1-based), ties averaged."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=float)
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rank_correlation(a: Sequence[float], b: Sequence[float]) -> float:
    """Pearson correlation of average ranks."""
    ra = rankdata(a)
    rb = rankdata(b)
    ra = ra - ra.mean()
    rb = rb - rb.mean()
    denom = math.sqrt(float((ra ** 2).sum()) * float((rb ** 2).sum()))
    if denom == 0.0:
        return 1.0 if np.array_equal(ra, rb) else 0.0
    return float((ra * rb).sum() / denom)
