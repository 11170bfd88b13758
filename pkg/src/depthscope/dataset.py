"""Heterogeneous dataset model: schema, ingestion, serialization, synthetic data.

A dataset is an ordered list of typed attributes (the schema) plus one row per
datapoint. Five attribute kinds are supported: scalars, low-dimensional points,
categorical sets, sampled functions on a shared grid, and sampled curves on a
shared time axis. Cell payloads are plain Python values (floats, tuples,
frozensets); the packed numpy column store used by the band engine is built
lazily per attribute.

Missing values are rejected at ingest: every row must carry exactly one value
per schema entry.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Sequence, Union

import numpy as np

from .errors import IngestError

MAX_POINT_DIM = 3


class Kind(str, Enum):
    SCALAR = "scalar"
    POINT = "point"
    CATEGORICAL_SET = "categorical_set"
    FUNCTION = "function"
    CURVE = "curve"


class DatasetFormat(str, Enum):
    JSON_V1 = "json-v1"
    CSV_WITH_SCHEMA = "csv"


@dataclass(frozen=True)
class AttributeSchema:
    """One typed column of the dataset.

    Exactly the fields relevant to ``kind`` are meaningful: ``dim`` for points
    and curves, ``universe`` for categorical sets, ``grid`` for functions,
    ``time_points`` for curves.
    """

    name: str
    kind: Kind
    dim: int = 1
    universe: tuple[str, ...] = ()
    grid: tuple[float, ...] = ()
    time_points: int = 0

    def __post_init__(self) -> None:
        if not self.name:
            raise IngestError("attribute name must be nonempty")
        if self.kind in (Kind.POINT, Kind.CURVE):
            if not 1 <= self.dim <= MAX_POINT_DIM:
                raise IngestError(
                    f"attribute {self.name!r}: dim must be in 1..{MAX_POINT_DIM}, got {self.dim}"
                )
        if self.kind is Kind.CATEGORICAL_SET:
            if len(set(self.universe)) != len(self.universe) or not self.universe:
                raise IngestError(f"attribute {self.name!r}: universe labels must be nonempty and unique")
        if self.kind is Kind.FUNCTION:
            g = self.grid
            if len(g) < 2 or any(b <= a for a, b in zip(g, g[1:])):
                raise IngestError(f"attribute {self.name!r}: grid must be strictly increasing, length >= 2")
        if self.kind is Kind.CURVE and self.time_points < 2:
            raise IngestError(f"attribute {self.name!r}: time_points must be >= 2")

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "kind": self.kind.value}
        if self.kind in (Kind.POINT, Kind.CURVE):
            out["dim"] = self.dim
        if self.kind is Kind.CATEGORICAL_SET:
            out["universe"] = list(self.universe)
        if self.kind is Kind.FUNCTION:
            out["grid"] = list(self.grid)
        if self.kind is Kind.CURVE:
            out["time_points"] = self.time_points
        return out

    @staticmethod
    def from_json(obj: dict[str, Any]) -> AttributeSchema:
        try:
            kind = Kind(obj["kind"])
        except (KeyError, ValueError) as e:
            raise IngestError(f"bad schema entry {obj!r}: {e}") from e
        return AttributeSchema(
            name=str(obj.get("name", "")),
            kind=kind,
            dim=int(obj.get("dim", 1)),
            universe=tuple(obj.get("universe", ())),
            grid=tuple(float(x) for x in obj.get("grid", ())),
            time_points=int(obj.get("time_points", 0)),
        )


# Cell payloads, by kind: scalar -> float; point -> tuple of floats;
# categorical set -> frozenset of labels; function -> tuple of floats;
# curve -> tuple of per-time tuples.
CellValue = Union[float, tuple, frozenset]


def _validate_cell(schema: AttributeSchema, value: Any, row: int) -> CellValue:
    where = f"row {row}, attribute {schema.name!r}"
    if value is None:
        raise IngestError(f"{where}: missing values are not supported")
    if schema.kind is Kind.SCALAR:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise IngestError(f"{where}: expected a number, got {type(value).__name__}")
        return float(value)
    if schema.kind is Kind.POINT:
        coords = tuple(float(x) for x in value)
        if len(coords) != schema.dim:
            raise IngestError(f"{where}: expected {schema.dim} coordinates, got {len(coords)}")
        return coords
    if schema.kind is Kind.CATEGORICAL_SET:
        members = frozenset(str(x) for x in value)
        unknown = members - set(schema.universe)
        if unknown:
            raise IngestError(f"{where}: unknown category {sorted(unknown)!r}")
        return members
    if schema.kind is Kind.FUNCTION:
        samples = tuple(float(x) for x in value)
        if len(samples) != len(schema.grid):
            raise IngestError(
                f"{where}: ragged function samples ({len(samples)} vs grid of {len(schema.grid)})"
            )
        return samples
    # curve
    try:
        rows = tuple(tuple(float(x) for x in step) for step in value)
    except TypeError as e:
        raise IngestError(f"{where}: curve must be a sequence of coordinate rows") from e
    if len(rows) != schema.time_points:
        raise IngestError(f"{where}: ragged curve samples ({len(rows)} vs {schema.time_points} time points)")
    for t, step in enumerate(rows):
        if len(step) != schema.dim:
            raise IngestError(f"{where}: time point {t} has {len(step)} coordinates, expected {schema.dim}")
    return rows


@dataclass(frozen=True)
class Dataset:
    """An immutable heterogeneous dataset (n >= 3 rows)."""

    id: str
    schema: tuple[AttributeSchema, ...]
    points: tuple[tuple[CellValue, ...], ...]
    labels: tuple[str, ...] | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.points) < 3:
            raise IngestError(f"dataset needs at least 3 datapoints, got {len(self.points)}")
        names = [s.name for s in self.schema]
        if len(set(names)) != len(names):
            raise IngestError("attribute names must be unique")
        for i, row in enumerate(self.points):
            if len(row) != len(self.schema):
                raise IngestError(f"row {i} has {len(row)} cells, schema has {len(self.schema)}")
        if self.labels is not None and len(self.labels) != len(self.points):
            raise IngestError("labels length must match number of datapoints")

    @property
    def n(self) -> int:
        return len(self.points)

    def attribute_index(self, name: str) -> int:
        for i, s in enumerate(self.schema):
            if s.name == name:
                return i
        raise KeyError(name)

    @cached_property
    def _columns(self) -> tuple[np.ndarray, ...]:
        return tuple(self._build_column(a) for a in range(len(self.schema)))

    def column(self, attr: int) -> np.ndarray:
        """Packed numpy view of one attribute across all datapoints.

        scalar -> (n,) float64; point -> (n, dim) float64;
        categorical set -> (n, nwords) uint64 bit masks over the universe;
        function -> (n, len(grid)) float64; curve -> (n, time_points, dim) float64.
        """
        return self._columns[attr]

    def _build_column(self, attr: int) -> np.ndarray:
        s = self.schema[attr]
        cells = [row[attr] for row in self.points]
        if s.kind is Kind.SCALAR:
            return np.asarray(cells, dtype=np.float64)
        if s.kind is Kind.POINT:
            return np.asarray(cells, dtype=np.float64)
        if s.kind is Kind.CATEGORICAL_SET:
            return pack_category_sets(cells, s.universe)
        if s.kind is Kind.FUNCTION:
            return np.asarray(cells, dtype=np.float64)
        return np.asarray(cells, dtype=np.float64)  # curve: (n, T, dim)

    def to_json_obj(self) -> dict[str, Any]:
        rows = []
        for row in self.points:
            cells: list[Any] = []
            for s, v in zip(self.schema, row):
                if s.kind is Kind.SCALAR:
                    cells.append(v)
                elif s.kind is Kind.CATEGORICAL_SET:
                    cells.append(sorted(v))  # type: ignore[arg-type]
                elif s.kind is Kind.CURVE:
                    cells.append([list(step) for step in v])  # type: ignore[union-attr]
                else:
                    cells.append(list(v))  # type: ignore[arg-type]
            rows.append(cells)
        out: dict[str, Any] = {
            "id": self.id,
            "schema": [s.to_json() for s in self.schema],
            "rows": rows,
        }
        if self.labels is not None:
            out["labels"] = list(self.labels)
        if self.metadata:
            out["metadata"] = self.metadata
        return out


def serialize_dataset(dataset: Dataset) -> bytes:
    """Canonical JSON v1 encoding; parse(serialize(d)) reproduces d exactly."""
    return json.dumps(dataset.to_json_obj(), sort_keys=True, separators=(",", ":")).encode()


def dataset_content_id(dataset: Dataset) -> str:
    """Content hash over schema and rows (id/labels/metadata excluded)."""
    obj = dataset.to_json_obj()
    obj.pop("id", None)
    obj.pop("labels", None)
    obj.pop("metadata", None)
    payload = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


def pack_category_sets(cells: Sequence[frozenset], universe: tuple[str, ...]) -> np.ndarray:
    """Encode category sets as little-endian uint64 bit masks over the universe."""
    nwords = (len(universe) + 63) // 64
    index = {label: i for i, label in enumerate(universe)}
    out = np.zeros((len(cells), nwords), dtype=np.uint64)
    for i, members in enumerate(cells):
        for label in members:
            b = index[label]
            out[i, b >> 6] |= np.uint64(1) << np.uint64(b & 63)
    return out


def parse_dataset(data: bytes, fmt: DatasetFormat = DatasetFormat.JSON_V1,
                  schema_data: bytes | None = None) -> Dataset:
    """Parse a dataset from bytes.

    JSON v1 is self-describing. CSV requires a sidecar schema (JSON bytes with
    a ``schema`` list restricted to scalar and categorical kinds); functions
    and curves are not representable in CSV.
    """
    if fmt is DatasetFormat.JSON_V1:
        return _parse_json(data)
    if fmt is DatasetFormat.CSV_WITH_SCHEMA:
        if schema_data is None:
            raise IngestError("CSV ingestion requires a sidecar schema file")
        return _parse_csv(data, schema_data)
    raise IngestError(f"unknown format {fmt!r}")


def _parse_json(data: bytes) -> Dataset:
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as e:
        raise IngestError(f"invalid JSON: {e}") from e
    if not isinstance(obj, dict) or "schema" not in obj or "rows" not in obj:
        raise IngestError("dataset JSON must contain 'schema' and 'rows'")
    schema = tuple(AttributeSchema.from_json(s) for s in obj["schema"])
    points = []
    for i, row in enumerate(obj["rows"]):
        if len(row) != len(schema):
            raise IngestError(f"row {i} has {len(row)} cells, schema has {len(schema)}")
        points.append(tuple(_validate_cell(s, v, i) for s, v in zip(schema, row)))
    labels = tuple(str(x) for x in obj["labels"]) if "labels" in obj else None
    metadata = obj.get("metadata", {})
    ds_id = str(obj.get("id", "")) or None
    d = Dataset(id=ds_id or "unnamed", schema=schema, points=tuple(points),
                labels=labels, metadata=metadata)
    if ds_id is None:
        d = Dataset(id=dataset_content_id(d), schema=schema, points=d.points,
                    labels=labels, metadata=metadata)
    return d


def _parse_csv(data: bytes, schema_data: bytes) -> Dataset:
    try:
        schema_obj = json.loads(schema_data)
    except json.JSONDecodeError as e:
        raise IngestError(f"invalid schema JSON: {e}") from e
    schema = tuple(AttributeSchema.from_json(s) for s in schema_obj.get("schema", []))
    for s in schema:
        if s.kind not in (Kind.SCALAR, Kind.CATEGORICAL_SET):
            raise IngestError(f"attribute {s.name!r}: kind {s.kind.value} is not representable in CSV")
    reader = csv.reader(io.StringIO(data.decode()))
    rows = list(reader)
    if not rows:
        raise IngestError("empty CSV")
    header = rows[0]
    if header != [s.name for s in schema]:
        raise IngestError(f"CSV header {header!r} does not match schema names")
    points = []
    for i, row in enumerate(rows[1:]):
        if len(row) != len(schema):
            raise IngestError(f"row {i} has {len(row)} cells, schema has {len(schema)}")
        cells = []
        for s, raw in zip(schema, row):
            if s.kind is Kind.SCALAR:
                try:
                    cells.append(_validate_cell(s, float(raw), i))
                except ValueError as e:
                    raise IngestError(f"row {i}, attribute {s.name!r}: not a number: {raw!r}") from e
            else:
                members = [m for m in raw.split("|") if m]
                cells.append(_validate_cell(s, members, i))
        points.append(tuple(cells))
    d = Dataset(id="unnamed", schema=schema, points=tuple(points))
    return Dataset(id=dataset_content_id(d), schema=schema, points=d.points)


def subsample(dataset: Dataset, n: int, seed: int) -> Dataset:
    """Seeded uniform row subsample (without replacement), preserving order.

    Published row subsets (the mushroom-style 100-row workflows) are rarely
    documented; this is the reproducible stand-in.
    """
    if not 3 <= n <= dataset.n:
        raise IngestError(f"subsample size must be in [3, {dataset.n}], got {n}")
    rng = np.random.default_rng(seed)
    keep = np.sort(rng.choice(dataset.n, size=n, replace=False))
    labels = tuple(dataset.labels[i] for i in keep) if dataset.labels else None
    metadata = dict(dataset.metadata)
    if "ground_truth_labels" in metadata:
        metadata["ground_truth_labels"] = [metadata["ground_truth_labels"][i] for i in keep]
    metadata["subsample"] = {"of": dataset.id, "seed": seed}
    return Dataset(
        id=f"{dataset.id}-sub{n}-seed{seed}",
        schema=dataset.schema,
        points=tuple(dataset.points[i] for i in keep),
        labels=labels,
        metadata=metadata,
    )


# ---------------------------------------------------------------------------
# Synthetic datasets (ground-truth mode labels attached as metadata)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Unimodal1D:
    n: int
    mean: float = 0.0
    sd: float = 1.0


@dataclass(frozen=True)
class Bimodal1D:
    n: int
    means: tuple[float, float] = (-3.0, 3.0)
    sds: tuple[float, float] = (1.0, 1.0)
    mixture: float = 0.5


@dataclass(frozen=True)
class CurveEnsemble:
    """Hurricane-style track ensemble: a 2D curve plus two along-track functions.

    Each time point carries four values (x, y, wind, pressure).
    """

    n: int
    time_points: int = 60
    modes: int = 2


SyntheticSpec = Union[Unimodal1D, Bimodal1D, CurveEnsemble]


def _mode_assignment(n: int, weights: Sequence[float], rng: np.random.Generator) -> np.ndarray:
    """Deterministic mode counts (round(n*w)), randomly permuted across rows."""
    weights = np.asarray(weights, dtype=float)
    if weights.size == 0 or weights.sum() <= 0:
        raise IngestError("empty mixture")
    weights = weights / weights.sum()
    counts = np.floor(weights * n).astype(int)
    # distribute the remainder to the largest fractional parts, ties by index
    rem = n - counts.sum()
    frac = weights * n - np.floor(weights * n)
    for idx in np.lexsort((np.arange(weights.size), -frac))[:rem]:
        counts[idx] += 1
    labels = np.repeat(np.arange(weights.size), counts)
    return labels[rng.permutation(n)]


def generate_synthetic(spec: SyntheticSpec, seed: int) -> Dataset:
    """Seeded synthetic dataset with ground-truth mode labels in metadata."""
    if spec.n <= 0:
        raise IngestError(f"n must be positive, got {spec.n}")
    rng = np.random.default_rng(seed)
    if isinstance(spec, Unimodal1D):
        values = rng.normal(spec.mean, spec.sd, size=spec.n)
        labels = np.zeros(spec.n, dtype=int)
        schema = (AttributeSchema("value", Kind.SCALAR),)
        points = tuple((float(v),) for v in values)
        name = f"unimodal1d-n{spec.n}-seed{seed}"
    elif isinstance(spec, Bimodal1D):
        if len(spec.means) != len(spec.sds) or not spec.means:
            raise IngestError("means and sds must be nonempty and the same length")
        labels = _mode_assignment(spec.n, [spec.mixture, 1.0 - spec.mixture], rng)
        means = np.asarray(spec.means)[labels]
        sds = np.asarray(spec.sds)[labels]
        values = rng.normal(means, sds)
        schema = (AttributeSchema("value", Kind.SCALAR),)
        points = tuple((float(v),) for v in values)
        name = f"bimodal1d-n{spec.n}-seed{seed}"
    elif isinstance(spec, CurveEnsemble):
        return _generate_curve_ensemble(spec, seed)
    else:
        raise IngestError(f"unknown synthetic spec {spec!r}")
    return Dataset(
        id=name,
        schema=schema,
        points=points,
        metadata={"ground_truth_labels": labels.tolist(), "seed": seed},
    )


def _smooth_noise(rng: np.random.Generator, t: np.ndarray, scale: float) -> np.ndarray:
    """Low-frequency noise over t in [0, 1]: a few random sinusoid harmonics."""
    out = np.zeros_like(t)
    for k in range(1, 4):
        out += rng.normal(0, scale / k) * np.sin(np.pi * k * t + rng.uniform(0, 2 * np.pi))
    return out


def _generate_curve_ensemble(spec: CurveEnsemble, seed: int) -> Dataset:
    """Forecast-ensemble style tracks: members of a mode share a base track and
    differ by a cross-track offset and an along-track (timing) offset, both
    fanning out over time, plus a little smooth jitter. This gives nested,
    rarely-crossing tracks, so pointwise simplex containment is informative
    rather than collapsing over many time points."""
    if spec.modes <= 0:
        raise IngestError("modes must be positive")
    rng = np.random.default_rng(seed)
    T = spec.time_points
    t = np.linspace(0.0, 1.0, T)
    labels = _mode_assignment(spec.n, [1.0 / spec.modes] * spec.modes, rng)

    # shared track early on, mode bifurcation ramping in over the last half
    # (a forecast ensemble diverges late, which keeps a global center early)
    ramp = np.clip((t - 0.5) / 0.5, 0.0, 1.0) ** 2
    base = []
    for m in range(spec.modes):
        lateral = (m - (spec.modes - 1) / 2.0) * 4.0 * ramp
        base.append((t * 10.0, lateral))
    base_wind = [60.0 + 12.0 * m * ramp + 10.0 * np.sin(2 * np.pi * t) for m in range(spec.modes)]
    base_pressure = [980.0 - 8.0 * m * ramp - 10.0 * t for m in range(spec.modes)]
    cross_spread = 0.3 + 2.0 * t
    along_spread = 0.15 + 0.8 * t

    grid = tuple(float(v) for v in np.arange(T, dtype=float))
    schema = (
        AttributeSchema("track", Kind.CURVE, dim=2, time_points=T),
        AttributeSchema("wind_speed", Kind.FUNCTION, grid=grid),
        AttributeSchema("pressure", Kind.FUNCTION, grid=grid),
    )
    points = []
    for i in range(spec.n):
        m = labels[i]
        bx, by = base[m]
        a = rng.normal()   # cross-track factor
        c = rng.normal()   # along-track (timing) factor
        x = bx + c * along_spread + _smooth_noise(rng, t, 0.03)
        y = by + a * cross_spread + _smooth_noise(rng, t, 0.03)
        wind = base_wind[m] + rng.normal() * (2.0 + 6.0 * t) + _smooth_noise(rng, t, 0.3)
        pressure = base_pressure[m] + rng.normal() * (1.0 + 3.0 * t) + _smooth_noise(rng, t, 0.2)
        track = tuple((float(u), float(v)) for u, v in zip(x, y))
        points.append((track, tuple(float(v) for v in wind), tuple(float(v) for v in pressure)))
    return Dataset(
        id=f"curves-n{spec.n}-T{T}-seed{seed}",
        schema=schema,
        points=tuple(points),
        labels=tuple(f"track-{i}" for i in range(spec.n)),
        metadata={"ground_truth_labels": labels.tolist(), "seed": seed},
    )


def generate_mixed(n: int, seed: int, n_scalar: int = 4, n_categorical: int = 4,
                   n_point: int = 0, n_function: int = 0, n_curve: int = 0,
                   modes: int = 2, separation: float = 3.0,
                   grid_len: int = 16, curve_len: int = 8) -> Dataset:
    """Mushroom-style mixed dataset: all attributes correlated with a latent mode.

    Categorical attributes hold a single label drawn from a mode-dependent
    distribution over a small universe, numeric attributes are mode-shifted
    gaussians, so clusters are recoverable from any sufficiently large subset
    of attributes.
    """
    if n <= 0:
        raise IngestError(f"n must be positive, got {n}")
    rng = np.random.default_rng(seed)
    labels = _mode_assignment(n, [1.0 / modes] * modes, rng)
    schema: list[AttributeSchema] = []
    columns: list[list[CellValue]] = []

    for a in range(n_scalar):
        shift = rng.normal(0, 1, size=modes) * separation
        vals = rng.normal(shift[labels], 1.0)
        schema.append(AttributeSchema(f"num_{a}", Kind.SCALAR))
        columns.append([float(v) for v in vals])

    for a in range(n_categorical):
        size = int(rng.integers(3, 7))
        universe = tuple(f"c{a}_{j}" for j in range(size))
        # each mode prefers one category with probability ~0.75
        prefs = rng.integers(0, size, size=modes)
        cells: list[CellValue] = []
        for i in range(n):
            if rng.random() < 0.75:
                j = int(prefs[labels[i]])
            else:
                j = int(rng.integers(0, size))
            cells.append(frozenset([universe[j]]))
        schema.append(AttributeSchema(f"cat_{a}", Kind.CATEGORICAL_SET, universe=universe))
        columns.append(cells)

    for a in range(n_point):
        centers = rng.normal(0, 1, size=(modes, 2)) * separation
        pts = centers[labels] + rng.normal(0, 1, size=(n, 2))
        schema.append(AttributeSchema(f"pt_{a}", Kind.POINT, dim=2))
        columns.append([tuple(float(x) for x in p) for p in pts])

    t = np.linspace(0.0, 1.0, grid_len)
    for a in range(n_function):
        base = [separation * rng.normal(0, 1) * np.sin(np.pi * t + rng.uniform(0, np.pi))
                for _ in range(modes)]
        cells = []
        for i in range(n):
            f = base[labels[i]] + _smooth_noise(rng, t, 0.5)
            cells.append(tuple(float(v) for v in f))
        schema.append(AttributeSchema(f"fn_{a}", Kind.FUNCTION, grid=tuple(float(v) for v in t)))
        columns.append(cells)

    tc = np.linspace(0.0, 1.0, curve_len)
    for a in range(n_curve):
        base = [(separation * rng.normal(0, 1) * tc + _smooth_noise(rng, tc, 0.5),
                 separation * rng.normal(0, 1) * tc + _smooth_noise(rng, tc, 0.5))
                for _ in range(modes)]
        cells = []
        for i in range(n):
            bx, by = base[labels[i]]
            x = bx + _smooth_noise(rng, tc, 0.3)
            y = by + _smooth_noise(rng, tc, 0.3)
            cells.append(tuple((float(a_), float(b_)) for a_, b_ in zip(x, y)))
        schema.append(AttributeSchema(f"cv_{a}", Kind.CURVE, dim=2, time_points=curve_len))
        columns.append(cells)

    points = tuple(tuple(columns[a][i] for a in range(len(schema))) for i in range(n))
    return Dataset(
        id=f"mixed-n{n}-seed{seed}",
        schema=tuple(schema),
        points=points,
        metadata={"ground_truth_labels": labels.tolist(), "seed": seed},
    )
