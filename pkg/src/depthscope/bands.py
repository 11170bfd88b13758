"""Random bands over datapoint subsets: planning, inclusion tests, size measures.

A band is spanned by a subset of r datapoints. Its geometry depends on the
attribute kind: an interval for scalars, a convex hull for points, a pointwise
min/max envelope for functions, the lattice between intersection and union for
category sets, and a per-time-point hull sweep for curves. A datapoint is
inside a heterogeneous band iff it is inside every per-attribute band; the
band's size is the product of the per-attribute sizes.

Boundary convention is closed everywhere: interval endpoints, hull faces and
envelope equality all count as included. Hull tests use an absolute tolerance
on signed areas/volumes, so degenerate (collinear/coplanar) member sets are
legal bands with size zero.

This module has two layers: scalar predicates (`band_includes_*`,
`band_size`), which are the reference semantics, and vectorized per-attribute
kernels used by the inclusion-matrix builder. Tests pin the two layers
together on random inputs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dataset import AttributeSchema, Dataset, Kind
from .errors import AnalysisError

DEFAULT_BAND_BUDGET = 200_000
HULL_TOL = 1e-9
_LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# Band plans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BandPlan:
    """A deterministic, lexicographically ordered list of band member subsets."""

    subset_size: int
    n: int
    exhaustive: bool
    budget: int
    seed: int
    member_indices: np.ndarray  # (band_count, subset_size) int32, rows sorted

    @property
    def band_count(self) -> int:
        return self.member_indices.shape[0]

    def to_json_obj(self) -> dict:
        return {
            "subset_size": self.subset_size,
            "n": self.n,
            "enumeration": {"kind": "exhaustive" if self.exhaustive else "sampled",
                            "budget": self.budget, "seed": self.seed},
            "member_indices": self.member_indices.tolist(),
        }

    @staticmethod
    def from_json_obj(obj: dict) -> "BandPlan":
        enum = obj["enumeration"]
        return BandPlan(
            subset_size=int(obj["subset_size"]),
            n=int(obj["n"]),
            exhaustive=enum["kind"] == "exhaustive",
            budget=int(enum.get("budget", DEFAULT_BAND_BUDGET)),
            seed=int(enum.get("seed", 0)),
            member_indices=np.asarray(obj["member_indices"], dtype=np.int32),
        )


def min_subset_size(schema: Sequence[AttributeSchema]) -> int:
    """Shared subset size r: the largest minimal band cardinality over attributes.

    Scalars, functions and category sets need two members; d-dimensional
    points and curves need d+1 (a simplex). Lower-arity attributes use the
    natural r-member generalization of their band.
    """
    r = 2
    for s in schema:
        if s.kind in (Kind.POINT, Kind.CURVE):
            r = max(r, s.dim + 1)
    return r


def plan_bands(dataset: Dataset, budget: int | None = None, seed: int = 0) -> BandPlan:
    """Choose the band subsets: exhaustive when C(n, r) fits the budget,
    otherwise exactly `budget` distinct subsets sampled uniformly without
    replacement. Rows are sorted lexicographically either way, so signature
    positions are stable."""
    budget = DEFAULT_BAND_BUDGET if budget is None else int(budget)
    r = min_subset_size(dataset.schema)
    n = dataset.n
    if n < r:
        raise AnalysisError("plan-bands", f"need at least {r} datapoints for this schema, got {n}")
    if budget < n:
        raise AnalysisError("plan-bands", f"budget must be >= n ({n}), got {budget}")
    total = math.comb(n, r)
    if total <= budget:
        members = np.array(list(itertools.combinations(range(n), r)), dtype=np.int32)
        return BandPlan(r, n, True, budget, seed, members)
    return BandPlan(r, n, False, budget, seed, _sample_subsets(n, r, budget, seed, total))


def _sample_subsets(n: int, r: int, budget: int, seed: int, total: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    if total <= 4 * budget:
        # dense regime: enumerate and subsample indices
        all_subsets = np.array(list(itertools.combinations(range(n), r)), dtype=np.int32)
        pick = rng.choice(total, size=budget, replace=False)
        return all_subsets[np.sort(pick)]
    kept = np.empty((0, r), dtype=np.int32)
    while kept.shape[0] < budget:
        need = budget - kept.shape[0]
        draw = rng.integers(0, n, size=(need + need // 4 + 64, r)).astype(np.int32)
        draw.sort(axis=1)
        draw = draw[np.all(draw[:, 1:] > draw[:, :-1], axis=1)]
        cat = np.concatenate([kept, draw])
        _, first = np.unique(cat, axis=0, return_index=True)
        kept = cat[np.sort(first)][:budget]  # draw order = uniform without replacement
    kept = kept[np.lexsort(kept.T[::-1])]
    return kept


# ---------------------------------------------------------------------------
# Scalar inclusion predicates (reference semantics)
# ---------------------------------------------------------------------------


def band_includes_scalar(v: float, members: Iterable[float]) -> bool:
    m = list(members)
    return min(m) <= v <= max(m)


def band_includes_set(s: Iterable, members: Sequence[Iterable]) -> bool:
    """Intersection of members <= s <= union of members (non-strict)."""
    sets = [frozenset(m) for m in members]
    inter = frozenset.intersection(*sets)
    union = frozenset.union(*sets)
    s = frozenset(s)
    return inter <= s <= union


def band_includes_function(f: Sequence[float], members: Sequence[Sequence[float]]) -> bool:
    arr = np.asarray(members, dtype=float)
    fv = np.asarray(f, dtype=float)
    return bool(np.all(arr.min(axis=0) <= fv) and np.all(fv <= arr.max(axis=0)))


def band_includes_point(p: Sequence[float], members: Sequence[Sequence[float]],
                        tol: float = HULL_TOL) -> bool:
    """Closed convex-hull membership, robust to degenerate member sets."""
    return point_in_hull(np.asarray(p, dtype=float), np.asarray(members, dtype=float), tol)


def band_includes_curve(c: Sequence[Sequence[float]],
                        members: Sequence[Sequence[Sequence[float]]],
                        tol: float = HULL_TOL) -> bool:
    carr = np.asarray(c, dtype=float)                # (T, d)
    marr = np.asarray(members, dtype=float)          # (r, T, d)
    for t in range(carr.shape[0]):
        if not point_in_hull(carr[t], marr[:, t, :], tol):
            return False
    return True


def heterogeneous_inclusion(datapoint: Sequence, member_rows: Sequence[Sequence],
                            schema: Sequence[AttributeSchema]) -> bool:
    """Conjunction of the per-attribute inclusion bits for one datapoint."""
    for a, s in enumerate(schema):
        cell = datapoint[a]
        members = [row[a] for row in member_rows]
        if s.kind is Kind.SCALAR:
            ok = band_includes_scalar(cell, members)
        elif s.kind is Kind.POINT:
            ok = band_includes_point(cell, members)
        elif s.kind is Kind.CATEGORICAL_SET:
            ok = band_includes_set(cell, members)
        elif s.kind is Kind.FUNCTION:
            ok = band_includes_function(cell, members)
        else:
            ok = band_includes_curve(cell, members)
        if not ok:
            return False
    return True


# --- hull membership -------------------------------------------------------


def _on_segment(p: np.ndarray, a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    ab = b - a
    ap = p - a
    if p.shape[0] == 2:
        cross = abs(ab[0] * ap[1] - ab[1] * ap[0])
    else:
        cross = float(np.linalg.norm(np.cross(ab, ap)))
    if cross > tol:
        return False
    return float(np.dot(ap, ab)) >= -tol and float(np.dot(p - b, a - b)) >= -tol


def _in_triangle_2d(p: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray,
                    tol: float) -> bool:
    area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if abs(area) > tol:
        s = 1.0 if area > 0 else -1.0
        d1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        d2 = (c[0] - b[0]) * (p[1] - b[1]) - (c[1] - b[1]) * (p[0] - b[0])
        d3 = (a[0] - c[0]) * (p[1] - c[1]) - (a[1] - c[1]) * (p[0] - c[0])
        return s * d1 >= -tol and s * d2 >= -tol and s * d3 >= -tol
    # collinear triangle: its hull is the widest of the three segments
    return (_on_segment(p, a, b, tol) or _on_segment(p, b, c, tol)
            or _on_segment(p, a, c, tol))


def _in_triangle_3d(p: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray,
                    tol: float) -> bool:
    normal = np.cross(b - a, c - a)
    nn = float(np.linalg.norm(normal))
    if nn <= tol:
        return (_on_segment(p, a, b, tol) or _on_segment(p, b, c, tol)
                or _on_segment(p, a, c, tol))
    if abs(float(np.dot(p - a, normal))) > tol * max(nn, 1.0):
        return False
    drop = int(np.argmax(np.abs(normal)))
    keep = [i for i in range(3) if i != drop]
    return _in_triangle_2d(p[keep], a[keep], b[keep], c[keep], tol)


def _in_tetrahedron(p: np.ndarray, verts: np.ndarray, tol: float) -> bool:
    a = verts[0]
    m = (verts[1:] - a).T  # 3x3
    vol = float(np.linalg.det(m))
    if abs(vol) <= tol:
        return any(_in_triangle_3d(p, *verts[list(combo)], tol=tol)
                   for combo in itertools.combinations(range(4), 3))
    s = 1.0 if vol > 0 else -1.0
    for i in range(4):
        repl = verts.copy()
        repl[i] = p
        vi = float(np.linalg.det((repl[1:] - repl[0]).T))
        if s * vi < -tol:
            return False
    return True


def point_in_hull(p: np.ndarray, members: np.ndarray, tol: float = HULL_TOL) -> bool:
    """Is p inside the closed convex hull of the member points?

    By Caratheodory, p is in the hull iff it is in the simplex of some
    (d+1)-subset of members; each simplex test degrades gracefully to
    lower-dimensional tests when the subset is affinely dependent.
    """
    members = np.atleast_2d(members)
    d = members.shape[1]
    m = members.shape[0]
    if d == 1:
        return float(members.min()) - tol <= p[0] <= float(members.max()) + tol
    if m == 1:
        return bool(np.all(np.abs(p - members[0]) <= tol))
    if d == 2:
        if m == 2:
            return _on_segment(p, members[0], members[1], tol)
        return any(_in_triangle_2d(p, *members[list(c)], tol=tol)
                   for c in itertools.combinations(range(m), 3))
    if d == 3:
        if m == 2:
            return _on_segment(p, members[0], members[1], tol)
        if m == 3:
            return _in_triangle_3d(p, *members, tol=tol)
        return any(_in_tetrahedron(p, members[list(c)], tol)
                   for c in itertools.combinations(range(m), 4))
    raise AnalysisError("bands", f"unsupported point dimension {d}")


# ---------------------------------------------------------------------------
# Band sizes
# ---------------------------------------------------------------------------


def hull_volume(points: np.ndarray) -> float:
    """Volume of the convex hull of a small point set (d <= 3).

    Degenerate sets have volume 0. In 3D only simplices (4 points) arise from
    band plans, since the shared subset size never exceeds 4.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m, d = pts.shape
    if d == 1:
        return float(pts.max() - pts.min())
    if m <= d:
        return 0.0
    if d == 2:
        return _polygon_hull_area(pts)
    if d == 3:
        if m != 4:
            raise AnalysisError("bands", "3D hull volume implemented for simplices only")
        return abs(float(np.linalg.det((pts[1:] - pts[0]).T))) / 6.0
    raise AnalysisError("bands", f"unsupported point dimension {d}")


def _polygon_hull_area(pts: np.ndarray) -> float:
    """Monotone-chain convex hull, then the shoelace formula."""
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    p = pts[order]

    def half(chain_pts):
        chain: list[np.ndarray] = []
        for q in chain_pts:
            while len(chain) >= 2:
                u, v = chain[-2], chain[-1]
                if (v[0] - u[0]) * (q[1] - u[1]) - (v[1] - u[1]) * (q[0] - u[0]) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(q)
        return chain

    lower = half(p)
    upper = half(p[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return 0.0
    area = 0.0
    for i in range(len(hull)):
        x1, y1 = hull[i]
        x2, y2 = hull[(i + 1) % len(hull)]
        area += x1 * y2 - x2 * y1
    return abs(area) / 2.0


def _attribute_size(cell_members: Sequence, schema: AttributeSchema) -> tuple[float, float]:
    """(size, log_size) of one attribute's band."""
    if schema.kind is Kind.SCALAR:
        size = float(max(cell_members) - min(cell_members))
        return size, _safe_log(size)
    if schema.kind is Kind.POINT:
        size = hull_volume(np.asarray(cell_members, dtype=float))
        return size, _safe_log(size)
    if schema.kind is Kind.CATEGORICAL_SET:
        sets = [frozenset(m) for m in cell_members]
        free = len(frozenset.union(*sets) - frozenset.intersection(*sets))
        return float(2.0 ** free), free * _LN2
    if schema.kind is Kind.FUNCTION:
        arr = np.asarray(cell_members, dtype=float)
        env = arr.max(axis=0) - arr.min(axis=0)
        size = float(np.trapezoid(env, np.asarray(schema.grid)))
        return size, _safe_log(size)
    # curve: product of per-time hull volumes, accumulated in log space
    marr = np.asarray(cell_members, dtype=float)  # (r, T, d)
    log_size = 0.0
    for t in range(marr.shape[1]):
        log_size += _safe_log(hull_volume(marr[:, t, :]))
    return _safe_exp(log_size), log_size


def _safe_log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def _safe_exp(x: float) -> float:
    if x == -math.inf:
        return 0.0
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


@dataclass(frozen=True, eq=False)
class Band:
    """One realized band: member indices plus its per-attribute and total sizes."""

    member_indices: tuple[int, ...]
    per_attribute_size: np.ndarray
    total_size: float
    log_size: float


def band_size(member_rows: Sequence[Sequence], schema: Sequence[AttributeSchema]
              ) -> tuple[np.ndarray, float, float]:
    """Per-attribute sizes, total (their product) and the log-space total."""
    sizes = np.empty(len(schema))
    log_total = 0.0
    for a, s in enumerate(schema):
        size, log_size = _attribute_size([row[a] for row in member_rows], s)
        sizes[a] = size
        log_total += log_size
    total = _combine_product(sizes)
    if math.isnan(log_total):  # 0 * inf across attributes: zero extent wins
        log_total = -math.inf
    return sizes, total, log_total


def _combine_product(sizes: np.ndarray) -> float:
    if np.any(sizes == 0.0):
        return 0.0
    return float(np.prod(sizes))


def make_band(dataset: Dataset, member_indices: Sequence[int]) -> Band:
    idx = tuple(int(i) for i in member_indices)
    if len(idx) < 2 or len(set(idx)) != len(idx) or not all(0 <= i < dataset.n for i in idx):
        raise AnalysisError("bands", f"invalid band member indices {idx}")
    rows = [dataset.points[i] for i in idx]
    sizes, total, log_total = band_size(rows, dataset.schema)
    return Band(idx, sizes, total, log_total)


# ---------------------------------------------------------------------------
# Vectorized per-attribute kernels (bulk inclusion-matrix path)
# ---------------------------------------------------------------------------
#
# Kernels operate on the dataset's packed column arrays and a block of band
# member rows M (B, r). "Full" kernels return a (B, n) boolean matrix for
# cheap attribute kinds; "pairs" kernels evaluate only surviving
# (band, datapoint) index pairs, which keeps expensive geometry proportional
# to what the cheap attributes let through.


def full_inclusion_scalarlike(values: np.ndarray, members: np.ndarray) -> np.ndarray:
    """(B, n) bits for scalar/1D-point attributes: closed interval membership."""
    mem = values[members]  # (B, r)
    lo = mem.min(axis=1)[:, None]
    hi = mem.max(axis=1)[:, None]
    v = values[None, :]
    out = v >= lo
    out &= v <= hi
    return out


def full_inclusion_sets(masks: np.ndarray, members: np.ndarray) -> np.ndarray:
    """(B, n) bits for categorical sets: intersection <= s <= union, per word."""
    B = members.shape[0]
    n, nwords = masks.shape
    out = np.ones((B, n), dtype=bool)
    for w in range(nwords):
        col = masks[:, w]
        mem = col[members]  # (B, r)
        inter = mem[:, 0].copy()
        union = mem[:, 0].copy()
        for k in range(1, members.shape[1]):
            inter &= mem[:, k]
            union |= mem[:, k]
        s = col[None, :]
        out &= (inter[:, None] & ~s) == 0
        out &= (s & ~union[:, None]) == 0
    return out


def pairs_inclusion_scalarlike(values: np.ndarray, members: np.ndarray,
                               rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    mem = values[members[rows]]  # (K, r)
    v = values[cols]
    return (v >= mem.min(axis=1)) & (v <= mem.max(axis=1))


def pairs_inclusion_sets(masks: np.ndarray, members: np.ndarray,
                         rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    keep = np.ones(rows.shape[0], dtype=bool)
    for w in range(masks.shape[1]):
        col = masks[:, w]
        mem = col[members[rows]]
        inter = mem[:, 0].copy()
        union = mem[:, 0].copy()
        for k in range(1, members.shape[1]):
            inter &= mem[:, k]
            union |= mem[:, k]
        s = col[cols]
        keep &= (inter & ~s) == 0
        keep &= (s & ~union) == 0
    return keep


def _vec_in_triangle(px, py, ax, ay, bx, by, cx, cy, tol: float) -> np.ndarray:
    """Vectorized closed point-in-triangle with collinear fallback."""
    area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    s = np.where(area >= 0, 1.0, -1.0)
    d1 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    d2 = (cx - bx) * (py - by) - (cy - by) * (px - bx)
    d3 = (ax - cx) * (py - cy) - (ay - cy) * (px - cx)
    ok = (s * d1 >= -tol) & (s * d2 >= -tol) & (s * d3 >= -tol)
    degen = np.abs(area) <= tol
    if np.any(degen):
        seg = (_vec_on_segment(px, py, ax, ay, bx, by, tol)
               | _vec_on_segment(px, py, bx, by, cx, cy, tol)
               | _vec_on_segment(px, py, ax, ay, cx, cy, tol))
        ok = np.where(degen, seg, ok)
    return ok


def _vec_on_segment(px, py, ax, ay, bx, by, tol: float) -> np.ndarray:
    abx = bx - ax
    aby = by - ay
    apx = px - ax
    apy = py - ay
    cross = np.abs(abx * apy - aby * apx)
    t1 = apx * abx + apy * aby
    t2 = (px - bx) * (ax - bx) + (py - by) * (ay - by)
    return (cross <= tol) & (t1 >= -tol) & (t2 >= -tol)


def _pairs_in_hull_2d(coords: np.ndarray, members: np.ndarray,
                      rows: np.ndarray, cols: np.ndarray, tol: float) -> np.ndarray:
    """Caratheodory over all triangles of the (possibly > 3) member points."""
    r = members.shape[1]
    px = coords[cols, 0]
    py = coords[cols, 1]
    mem = members[rows]  # (K, r)
    ok = np.zeros(rows.shape[0], dtype=bool)
    for combo in itertools.combinations(range(r), 3):
        ia, ib, ic = combo
        a = coords[mem[:, ia]]
        b = coords[mem[:, ib]]
        c = coords[mem[:, ic]]
        ok |= _vec_in_triangle(px, py, a[:, 0], a[:, 1], b[:, 0], b[:, 1],
                               c[:, 0], c[:, 1], tol)
        if ok.all():
            break
    return ok


def _pairs_in_simplex_3d(coords: np.ndarray, members: np.ndarray,
                         rows: np.ndarray, cols: np.ndarray, tol: float) -> np.ndarray:
    """Vectorized tetrahedron membership; degenerate cells fall back to the
    scalar hull test."""
    mem = members[rows]
    p = coords[cols]
    v0 = coords[mem[:, 0]]
    e1 = coords[mem[:, 1]] - v0
    e2 = coords[mem[:, 2]] - v0
    e3 = coords[mem[:, 3]] - v0
    vol = _det3(e1, e2, e3)
    s = np.where(vol >= 0, 1.0, -1.0)
    ok = np.ones(rows.shape[0], dtype=bool)
    pv = p - v0
    # replace each vertex by p in turn; the first uses p as the new origin
    ok &= s * _det3(coords[mem[:, 1]] - p, coords[mem[:, 2]] - p, coords[mem[:, 3]] - p) >= -tol
    ok &= s * _det3(pv, e2, e3) >= -tol
    ok &= s * _det3(e1, pv, e3) >= -tol
    ok &= s * _det3(e1, e2, pv) >= -tol
    degen = np.abs(vol) <= tol
    if np.any(degen):
        idx = np.nonzero(degen)[0]
        for i in idx:
            ok[i] = point_in_hull(p[i], coords[mem[i]], tol)
    return ok


def _det3(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return (a[:, 0] * (b[:, 1] * c[:, 2] - b[:, 2] * c[:, 1])
            - a[:, 1] * (b[:, 0] * c[:, 2] - b[:, 2] * c[:, 0])
            + a[:, 2] * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0]))


def pairs_inclusion_points(coords: np.ndarray, members: np.ndarray,
                           rows: np.ndarray, cols: np.ndarray,
                           tol: float = HULL_TOL) -> np.ndarray:
    d = coords.shape[1]
    if d == 1:
        return pairs_inclusion_scalarlike(coords[:, 0], members, rows, cols)
    if d == 2:
        return _pairs_in_hull_2d(coords, members, rows, cols, tol)
    if members.shape[1] == 4:
        return _pairs_in_simplex_3d(coords, members, rows, cols, tol)
    raise AnalysisError("bands", "3D hulls with more than 4 members are not planned")


def pairs_inclusion_functions(samples: np.ndarray, members: np.ndarray,
                              rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Envelope membership, short-circuiting across grid samples."""
    keep = np.ones(rows.shape[0], dtype=bool)
    live = np.arange(rows.shape[0])
    lrows, lcols = rows, cols
    for g in range(samples.shape[1]):
        col = samples[:, g]
        ok = pairs_inclusion_scalarlike(col, members, lrows, lcols)
        if not ok.all():
            keep[live[~ok]] = False
            live = live[ok]
            lrows = lrows[ok]
            lcols = lcols[ok]
            if live.size == 0:
                break
    return keep


def pairs_inclusion_curves(traj: np.ndarray, members: np.ndarray,
                           rows: np.ndarray, cols: np.ndarray,
                           tol: float = HULL_TOL) -> np.ndarray:
    """Per-time-point hull membership, short-circuiting across time."""
    keep = np.ones(rows.shape[0], dtype=bool)
    live = np.arange(rows.shape[0])
    lrows, lcols = rows, cols
    for t in range(traj.shape[1]):
        ok = pairs_inclusion_points(traj[:, t, :], members, lrows, lcols, tol)
        if not ok.all():
            keep[live[~ok]] = False
            live = live[ok]
            lrows = lrows[ok]
            lcols = lcols[ok]
            if live.size == 0:
                break
    return keep


# --- vectorized sizes -------------------------------------------------------


def _block_hull_volumes(coords: np.ndarray, mem: np.ndarray) -> np.ndarray:
    """(B,) hull volumes for member blocks over a point column."""
    d = coords.shape[1]
    r = mem.shape[1]
    if d == 1:
        vals = coords[mem, 0]
        return vals.max(axis=1) - vals.min(axis=1)
    if d == 2:
        if r == 3:
            a, b, c = coords[mem[:, 0]], coords[mem[:, 1]], coords[mem[:, 2]]
            return np.abs(_cross2(b - a, c - a)) / 2.0
        if r == 4:
            # hull area of 4 points = half the sum of the 4 triangle areas
            total = np.zeros(mem.shape[0])
            for combo in itertools.combinations(range(4), 3):
                a = coords[mem[:, combo[0]]]
                b = coords[mem[:, combo[1]]]
                c = coords[mem[:, combo[2]]]
                total += np.abs(_cross2(b - a, c - a)) / 2.0
            return total / 2.0
        return np.array([_polygon_hull_area(coords[m]) for m in mem])
    if d == 3 and r == 4:
        v0 = coords[mem[:, 0]]
        return np.abs(_det3(coords[mem[:, 1]] - v0, coords[mem[:, 2]] - v0,
                            coords[mem[:, 3]] - v0)) / 6.0
    raise AnalysisError("bands", "3D hulls with more than 4 members are not planned")


def _cross2(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]


def attribute_sizes(column: np.ndarray, members: np.ndarray,
                    schema: AttributeSchema) -> tuple[np.ndarray, np.ndarray]:
    """(sizes, log_sizes) of every band for one attribute, shape (B,)."""
    if schema.kind is Kind.SCALAR:
        mem = column[members]
        sizes = mem.max(axis=1) - mem.min(axis=1)
        return sizes, _vec_log(sizes)
    if schema.kind is Kind.POINT:
        sizes = _block_hull_volumes(column, members)
        return sizes, _vec_log(sizes)
    if schema.kind is Kind.CATEGORICAL_SET:
        free = np.zeros(members.shape[0], dtype=np.int64)
        for w in range(column.shape[1]):
            mem = column[:, w][members]
            inter = mem[:, 0].copy()
            union = mem[:, 0].copy()
            for k in range(1, members.shape[1]):
                inter &= mem[:, k]
                union |= mem[:, k]
            free += np.bitwise_count(union & ~inter).astype(np.int64)
        logs = free * _LN2
        with np.errstate(over="ignore"):
            sizes = np.exp2(free.astype(float))
        return sizes, logs
    if schema.kind is Kind.FUNCTION:
        grid = np.asarray(schema.grid)
        weights = np.empty(grid.size)
        weights[0] = (grid[1] - grid[0]) / 2.0
        weights[-1] = (grid[-1] - grid[-2]) / 2.0
        if grid.size > 2:
            weights[1:-1] = (grid[2:] - grid[:-2]) / 2.0
        sizes = np.zeros(members.shape[0])
        for g in range(grid.size):
            mem = column[:, g][members]
            sizes += weights[g] * (mem.max(axis=1) - mem.min(axis=1))
        return sizes, _vec_log(sizes)
    # curve
    logs = np.zeros(members.shape[0])
    for t in range(column.shape[1]):
        logs += _vec_log(_block_hull_volumes(column[:, t, :], members))
    with np.errstate(over="ignore"):
        sizes = np.exp(logs)
    return sizes, logs


def _vec_log(sizes: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(sizes)
