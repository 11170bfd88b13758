"""Independent brute-force oracles for band inclusion and band size.

Everything here is written directly from the per-datatype band definitions,
using different routes than the package: simplex membership via the
area/volume partition identity, hull volumes via scipy's Qhull, set-band sizes
by enumerating the subset lattice, integrals by an explicit trapezoid loop,
and depth by a naive double loop. Degenerate member sets are not handled here;
the randomized oracle datasets use continuous coordinates where degeneracies
have probability zero (handcrafted degenerate cases live in the unit tests).
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from depthscope.dataset import Dataset, Kind

AREA_TOL = 1e-9


def _tri_area(a, b, c) -> float:
    return abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])) / 2.0


def _tet_volume(a, b, c, d) -> float:
    m = np.array([b - a, c - a, d - a], dtype=float)
    return abs(float(np.linalg.det(m))) / 6.0


def in_simplex_2d(p, verts) -> bool:
    """p is in the triangle iff the three sub-triangles partition its area."""
    a, b, c = verts
    whole = _tri_area(a, b, c)
    parts = _tri_area(p, b, c) + _tri_area(a, p, c) + _tri_area(a, b, p)
    return parts <= whole + AREA_TOL


def in_simplex_3d(p, verts) -> bool:
    whole = _tet_volume(*verts)
    parts = sum(_tet_volume(*(list(verts[:i]) + [p] + list(verts[i + 1:])))
                for i in range(4))
    return parts <= whole + AREA_TOL


def point_in_hull(p, members) -> bool:
    """Caratheodory enumeration with the partition-identity simplex test."""
    members = np.atleast_2d(np.asarray(members, dtype=float))
    p = np.asarray(p, dtype=float)
    d = members.shape[1]
    if d == 1:
        return members.min() <= p[0] <= members.max()
    if d == 2:
        return any(in_simplex_2d(p, members[list(c)])
                   for c in itertools.combinations(range(len(members)), 3))
    return any(in_simplex_3d(p, members[list(c)])
               for c in itertools.combinations(range(len(members)), 4))


def scalar_in_band(v, members) -> bool:
    return min(members) <= v <= max(members)


def set_in_band(s, members) -> bool:
    inter = frozenset(members[0])
    union = frozenset(members[0])
    for m in members[1:]:
        inter = inter & frozenset(m)
        union = union | frozenset(m)
    return inter.issubset(s) and frozenset(s).issubset(union)


def function_in_band(f, members) -> bool:
    for g in range(len(f)):
        lo = min(m[g] for m in members)
        hi = max(m[g] for m in members)
        if not lo <= f[g] <= hi:
            return False
    return True


def curve_in_band(c, members) -> bool:
    T = len(c)
    for t in range(T):
        if not point_in_hull(np.asarray(c[t]), np.asarray([m[t] for m in members])):
            return False
    return True


def row_in_band(dataset: Dataset, i: int, member_idx) -> bool:
    row = dataset.points[i]
    members = [dataset.points[j] for j in member_idx]
    for a, schema in enumerate(dataset.schema):
        cells = [m[a] for m in members]
        if schema.kind is Kind.SCALAR:
            ok = scalar_in_band(row[a], cells)
        elif schema.kind is Kind.POINT:
            ok = point_in_hull(np.asarray(row[a]), np.asarray(cells))
        elif schema.kind is Kind.CATEGORICAL_SET:
            ok = set_in_band(row[a], cells)
        elif schema.kind is Kind.FUNCTION:
            ok = function_in_band(row[a], cells)
        else:
            ok = curve_in_band(row[a], cells)
        if not ok:
            return False
    return True


def hull_volume(points) -> float:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d = pts.shape[1]
    if d == 1:
        return float(pts.max() - pts.min())
    try:
        return float(ConvexHull(pts).volume)
    except QhullError:
        return 0.0


def set_band_size(members) -> int:
    """Count every set between the intersection and the union, by enumeration."""
    inter = frozenset(members[0])
    union = frozenset(members[0])
    for m in members[1:]:
        inter = inter & frozenset(m)
        union = union | frozenset(m)
    free = sorted(union - inter)
    count = 0
    for k in range(len(free) + 1):
        for extra in itertools.combinations(free, k):
            count += 1  # inter | set(extra) is one contained set
    return count


def function_band_size(members, grid) -> float:
    total = 0.0
    for g in range(len(grid) - 1):
        env_a = max(m[g] for m in members) - min(m[g] for m in members)
        env_b = max(m[g + 1] for m in members) - min(m[g + 1] for m in members)
        total += (grid[g + 1] - grid[g]) * (env_a + env_b) / 2.0
    return total


def band_total_size(dataset: Dataset, member_idx) -> float:
    members = [dataset.points[j] for j in member_idx]
    total = 1.0
    for a, schema in enumerate(dataset.schema):
        cells = [m[a] for m in members]
        if schema.kind is Kind.SCALAR:
            total *= max(cells) - min(cells)
        elif schema.kind is Kind.POINT:
            total *= hull_volume(np.asarray(cells))
        elif schema.kind is Kind.CATEGORICAL_SET:
            total *= set_band_size(cells)
        elif schema.kind is Kind.FUNCTION:
            total *= function_band_size(cells, schema.grid)
        else:
            for t in range(schema.time_points):
                total *= hull_volume(np.asarray([c[t] for c in cells]))
    return total


def inclusion_matrix(dataset: Dataset, member_rows) -> np.ndarray:
    """(bands, n) bits by triple loop."""
    B = len(member_rows)
    out = np.zeros((B, dataset.n), dtype=np.uint8)
    for b, idx in enumerate(member_rows):
        for i in range(dataset.n):
            out[b, i] = row_in_band(dataset, i, idx)
    return out


def pair_band_depth_1d(values) -> np.ndarray:
    """Naive double-loop band depth for scalars over exhaustive pairs."""
    values = list(values)
    n = len(values)
    pairs = list(itertools.combinations(range(n), 2))
    depths = np.zeros(n)
    for i, v in enumerate(values):
        count = 0
        for j, k in pairs:
            if min(values[j], values[k]) <= v <= max(values[j], values[k]):
                count += 1
        depths[i] = count / len(pairs)
    return depths


def masked_pair_band_depth_1d(values, tau: float) -> np.ndarray:
    values = list(values)
    n = len(values)
    pairs = [(j, k) for j, k in itertools.combinations(range(n), 2)]
    surviving = [(j, k) for j, k in pairs
                 if abs(values[j] - values[k]) <= tau]
    depths = np.zeros(n)
    if not surviving:
        return depths
    for i, v in enumerate(values):
        count = sum(1 for j, k in surviving
                    if min(values[j], values[k]) <= v <= max(values[j], values[k]))
        depths[i] = count / len(surviving)
    return depths


def random_mini_dataset(rng: np.random.Generator, require_kind: Kind | None = None) -> Dataset:
    """A small random heterogeneous dataset (n <= 8) for oracle comparisons."""
    from depthscope.dataset import AttributeSchema

    n = int(rng.integers(4, 9))
    kinds = [Kind.SCALAR, Kind.POINT, Kind.CATEGORICAL_SET, Kind.FUNCTION, Kind.CURVE]
    n_attrs = int(rng.integers(1, 4))
    chosen = [kinds[int(rng.integers(len(kinds)))] for _ in range(n_attrs)]
    if require_kind is not None and require_kind not in chosen:
        chosen[0] = require_kind
    schema = []
    columns = []
    for a, kind in enumerate(chosen):
        if kind is Kind.SCALAR:
            schema.append(AttributeSchema(f"s{a}", Kind.SCALAR))
            columns.append([float(v) for v in rng.normal(0, 2, n)])
        elif kind is Kind.POINT:
            dim = int(rng.integers(1, 4))
            schema.append(AttributeSchema(f"p{a}", Kind.POINT, dim=dim))
            columns.append([tuple(float(x) for x in row) for row in rng.normal(0, 1, (n, dim))])
        elif kind is Kind.CATEGORICAL_SET:
            u = tuple(f"u{a}_{j}" for j in range(int(rng.integers(2, 6))))
            schema.append(AttributeSchema(f"c{a}", Kind.CATEGORICAL_SET, universe=u))
            cells = []
            for _ in range(n):
                mask = rng.random(len(u)) < 0.5
                cells.append(frozenset(lab for lab, m in zip(u, mask) if m))
            columns.append(cells)
        elif kind is Kind.FUNCTION:
            G = int(rng.integers(2, 5))
            grid = tuple(float(v) for v in np.sort(rng.uniform(0, 1, G) + np.arange(G)))
            schema.append(AttributeSchema(f"f{a}", Kind.FUNCTION, grid=grid))
            columns.append([tuple(float(v) for v in rng.normal(0, 1, G)) for _ in range(n)])
        else:
            T = int(rng.integers(2, 4))
            dim = int(rng.integers(1, 4))
            schema.append(AttributeSchema(f"k{a}", Kind.CURVE, dim=dim, time_points=T))
            cells = []
            for _ in range(n):
                cells.append(tuple(tuple(float(x) for x in step)
                                   for step in rng.normal(0, 1, (T, dim))))
            columns.append(cells)
    points = tuple(tuple(columns[a][i] for a in range(n_attrs)) for i in range(n))
    return Dataset(id=f"mini-{rng.integers(1 << 30)}", schema=tuple(schema), points=points)


def spearman(a, b) -> float:
    """scipy-free reference for sanity; tests mostly use scipy directly."""
    from scipy.stats import spearmanr

    return float(spearmanr(a, b).statistic)


def log_band_size(dataset: Dataset, member_idx) -> float:
    """Log-space oracle total for comparing against curve log sizes."""
    members = [dataset.points[j] for j in member_idx]
    total = 0.0
    for a, schema in enumerate(dataset.schema):
        cells = [m[a] for m in members]
        if schema.kind is Kind.SCALAR:
            v = max(cells) - min(cells)
        elif schema.kind is Kind.POINT:
            v = hull_volume(np.asarray(cells))
        elif schema.kind is Kind.CATEGORICAL_SET:
            total += math.log(set_band_size(cells))
            continue
        elif schema.kind is Kind.FUNCTION:
            v = function_band_size(cells, schema.grid)
        else:
            for t in range(schema.time_points):
                vt = hull_volume(np.asarray([c[t] for c in cells]))
                total += math.log(vt) if vt > 0 else -math.inf
            continue
        total += math.log(v) if v > 0 else -math.inf
    return total
