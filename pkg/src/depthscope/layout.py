"""Similarity-induced 2D layout.

Force-directed placement where similarity acts as the spring constant of a
zero-rest-length attraction between every pair, and a 1/d vertex repulsion is
approximated with a Barnes-Hut quadtree. Zero-similarity points take no part
in the force simulation and are parked near the window boundary instead. A
quadtree-backed collision pass separates overlapping nodes afterwards.
Geospatial attributes (2D points or curves) bypass the simulation and are
normalized into the unit square.

The iteration order is part of the determinism contract: identical
(similarity, seed, iterations) yield bit-identical positions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .dataset import Dataset, Kind
from .errors import AnalysisError
from .similarity import SimilarityMatrix

logger = logging.getLogger(__name__)

OUTLIER_MARGIN = 0.05


@dataclass(frozen=True)
class LayoutConfig:
    iterations: int = 500
    theta: float = 0.7            # Barnes-Hut opening angle
    step0: float = 0.1            # initial displacement cap, decays linearly to 0
    repulsion: float = 0.05       # pairwise repulsion constant, scaled by 1/n
    energy_window: float = 0.1    # trailing fraction of iterations with energy checks


@dataclass(eq=False)
class LayoutResult:
    positions: np.ndarray              # (n, 2) in the unit square
    mode: str                          # "force" | "geospatial"
    iterations: int
    energy: float
    polylines: np.ndarray | None = None  # (n, T, 2) for geospatial curves
    isolated: tuple[int, ...] = field(default_factory=tuple)


@dataclass(eq=False)
class CollisionResult:
    positions: np.ndarray
    passes: int
    remaining_overlaps: int


# ---------------------------------------------------------------------------
# Barnes-Hut quadtree kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _build_quadtree(px, py, cx0, cy0, half0, max_depth):
    """Array-backed quadtree; node slots: child (m,4), leaf body id (-2 for
    internal, -1 empty), per-node point count and coordinate sums."""
    n = px.shape[0]
    # every insert cascades at most max_depth splits of 4 nodes each
    cap = 4 * max_depth * n + 8
    child = np.full((cap, 4), -1, dtype=np.int32)
    body = np.full(cap, -1, dtype=np.int32)
    count = np.zeros(cap, dtype=np.int64)
    sx = np.zeros(cap)
    sy = np.zeros(cap)
    ncx = np.zeros(cap)
    ncy = np.zeros(cap)
    nhalf = np.zeros(cap)
    ncx[0] = cx0
    ncy[0] = cy0
    nhalf[0] = half0
    used = 1
    for b in range(n):
        node = 0
        depth = 0
        while True:
            count[node] += 1
            sx[node] += px[b]
            sy[node] += py[b]
            if body[node] == -1 and child[node, 0] == -1:
                body[node] = b
                break
            if body[node] >= 0 and depth < max_depth:
                old = body[node]
                body[node] = -2
                h = nhalf[node] * 0.5
                for q in range(4):
                    ox = ncx[node] + (h if q & 1 else -h)
                    oy = ncy[node] + (h if q & 2 else -h)
                    ncx[used] = ox
                    ncy[used] = oy
                    nhalf[used] = h
                    child[node, q] = used
                    used += 1
                qo = 0
                if px[old] > ncx[node]:
                    qo += 1
                if py[old] > ncy[node]:
                    qo += 2
                co = child[node, qo]
                body[co] = old
                count[co] += 1
                sx[co] += px[old]
                sy[co] += py[old]
            elif body[node] >= 0:
                break  # depth limit: coincident points share this leaf
            qn = 0
            if px[b] > ncx[node]:
                qn += 1
            if py[b] > ncy[node]:
                qn += 2
            node = child[node, qn]
            depth += 1
    return child, body, count, sx, sy, nhalf


@njit(cache=True)
def _repulsion_forces(px, py, child, body, count, sx, sy, nhalf, theta, c_rep, fx, fy):
    n = px.shape[0]
    stack = np.empty(4 * 32 + 8, dtype=np.int32)
    for i in range(n):
        top = 0
        stack[0] = 0
        while top >= 0:
            node = stack[top]
            top -= 1
            m = count[node]
            if m == 0 or (body[node] == i and m == 1):
                continue
            dx = px[i] - sx[node] / m
            dy = py[i] - sy[node] / m
            d2 = dx * dx + dy * dy
            s = 2.0 * nhalf[node]
            if body[node] != -2 or s * s < theta * theta * d2:
                if d2 < 1e-18:
                    continue  # coincident bucket; collision pass separates it
                f = c_rep * m / d2
                fx[i] += f * dx
                fy[i] += f * dy
            else:
                for q in range(4):
                    c = child[node, q]
                    if c != -1 and count[c] > 0:
                        top += 1
                        stack[top] = c
    return


@njit(cache=True)
def _pair_energy(pos, S, c_rep):
    n = pos.shape[0]
    e = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            dx = pos[j, 0] - pos[i, 0]
            dy = pos[j, 1] - pos[i, 1]
            d2 = dx * dx + dy * dy
            e += 0.5 * S[i, j] * d2
            d = np.sqrt(d2)
            if d < 1e-12:
                d = 1e-12
            e -= c_rep * np.log(d)
    return e


@njit(cache=True)
def _force_iterations(pos, S, iterations, theta, c_rep, step0, energy_from):
    n = pos.shape[0]
    fx = np.zeros(n)
    fy = np.zeros(n)
    energies = np.zeros(max(iterations - energy_from, 0) + 1)
    for it in range(iterations):
        minx = pos[:, 0].min()
        maxx = pos[:, 0].max()
        miny = pos[:, 1].min()
        maxy = pos[:, 1].max()
        half = 0.5 * max(maxx - minx, maxy - miny) + 1e-9
        child, body, count, sx, sy, nhalf = _build_quadtree(
            pos[:, 0].copy(), pos[:, 1].copy(),
            0.5 * (minx + maxx), 0.5 * (miny + maxy), half, 32)
        for i in range(n):
            fx[i] = 0.0
            fy[i] = 0.0
        _repulsion_forces(pos[:, 0].copy(), pos[:, 1].copy(),
                          child, body, count, sx, sy, nhalf, theta, c_rep, fx, fy)
        for i in range(n - 1):
            for j in range(i + 1, n):
                w = S[i, j]
                if w <= 0.0:
                    continue
                dx = pos[j, 0] - pos[i, 0]
                dy = pos[j, 1] - pos[i, 1]
                fx[i] += w * dx
                fy[i] += w * dy
                fx[j] -= w * dx
                fy[j] -= w * dy
        step = step0 * (1.0 - it / iterations)
        for i in range(n):
            d = np.sqrt(fx[i] * fx[i] + fy[i] * fy[i])
            if d > step:
                pos[i, 0] += fx[i] / d * step
                pos[i, 1] += fy[i] / d * step
            else:
                pos[i, 0] += fx[i]
                pos[i, 1] += fy[i]
        if it >= energy_from:
            energies[it - energy_from] = _pair_energy(pos, S, c_rep)
    energies[-1] = _pair_energy(pos, S, c_rep)
    return energies


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def isolated_indices(values: np.ndarray) -> list[int]:
    """Points with zero similarity to every other point."""
    S = np.asarray(values, dtype=float)
    n = S.shape[0]
    if n <= 1:
        return []
    off = S.copy()
    np.fill_diagonal(off, 0.0)
    return [int(i) for i in np.nonzero(off.max(axis=1) <= 0.0)[0]]


def place_outliers(indices: Sequence[int], seed: int) -> np.ndarray:
    """Seeded positions within the 0.05-wide band along the unit-square border."""
    idx = sorted(int(i) for i in indices)
    rng = np.random.default_rng(seed)
    out = np.empty((len(idx), 2))
    for row, _ in enumerate(idx):
        side = int(rng.integers(4))
        t = rng.random()
        m = rng.random() * OUTLIER_MARGIN
        if side == 0:
            out[row] = (t, m)
        elif side == 1:
            out[row] = (1.0 - m, t)
        elif side == 2:
            out[row] = (t, 1.0 - m)
        else:
            out[row] = (m, t)
    return out


def _rescale_unit(pos: np.ndarray) -> np.ndarray:
    out = pos.copy()
    for axis in range(2):
        lo = out[:, axis].min()
        hi = out[:, axis].max()
        if hi - lo > 1e-12:
            out[:, axis] = (out[:, axis] - lo) / (hi - lo)
        else:
            out[:, axis] = 0.5
    return out


def force_layout(similarity: SimilarityMatrix | np.ndarray, seed: int,
                 iterations: int | None = None,
                 config: LayoutConfig = LayoutConfig()) -> LayoutResult:
    """Seeded force simulation; isolated points go to the boundary band."""
    values = similarity.values if isinstance(similarity, SimilarityMatrix) else np.asarray(similarity)
    n = values.shape[0]
    iterations = config.iterations if iterations is None else int(iterations)
    isolated = isolated_indices(values)
    active = [i for i in range(n) if i not in set(isolated)]
    positions = np.empty((n, 2))
    energy = 0.0

    if len(active) == 1:
        positions[active[0]] = (0.5, 0.5)
    elif active:
        rng = np.random.default_rng(seed)
        pos = rng.random((len(active), 2))
        sub = np.ascontiguousarray(values[np.ix_(active, active)])
        c_rep = config.repulsion / len(active)
        energy_from = int(iterations * (1.0 - config.energy_window))
        energies = _force_iterations(pos, sub, iterations, config.theta,
                                     c_rep, config.step0, energy_from)
        energy = float(energies[-1])
        rises = int(np.count_nonzero(np.diff(energies) > 1e-9))
        if rises:
            logger.warning("layout energy rose in %d of the last %d iterations",
                           rises, len(energies) - 1)
        positions[active] = _rescale_unit(pos)

    if isolated:
        positions[isolated] = place_outliers(isolated, seed)
    return LayoutResult(positions=positions, mode="force", iterations=iterations,
                        energy=energy, isolated=tuple(isolated))


def resolve_collisions(positions: np.ndarray, radius: float, seed: int = 0,
                       max_passes: int = 50) -> CollisionResult:
    """Symmetrically separate pairs closer than 2*radius; at most `max_passes`
    sweeps, clamped to the unit square. Points without an overlapping
    neighbor never move."""
    if radius <= 0:
        raise AnalysisError("layout", f"collision radius must be positive, got {radius}")
    pos = np.asarray(positions, dtype=float).copy()
    n = pos.shape[0]
    rng = np.random.default_rng(seed)
    min_d = 2.0 * radius
    passes = 0
    overlaps = 0
    for _ in range(max_passes):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((delta ** 2).sum(axis=2))
        iu = np.triu_indices(n, k=1)
        close = dist[iu] < min_d - 1e-15
        overlaps = int(np.count_nonzero(close))
        if overlaps == 0:
            break
        passes += 1
        disp = np.zeros_like(pos)
        rows = iu[0][close]
        cols = iu[1][close]
        for i, j in zip(rows, cols):
            d = dist[i, j]
            if d < 1e-12:
                angle = rng.random() * 2.0 * np.pi
                direction = np.array([np.cos(angle), np.sin(angle)])
            else:
                direction = delta[i, j] / d
            push = 0.5 * (min_d - d) * 1.0001
            disp[i] += push * direction
            disp[j] -= push * direction
        pos += disp
        np.clip(pos, 0.0, 1.0, out=pos)
    else:
        # budget exhausted; recount what is left
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((delta ** 2).sum(axis=2))
        iu = np.triu_indices(n, k=1)
        overlaps = int(np.count_nonzero(dist[iu] < min_d - 1e-15))
    return CollisionResult(positions=pos, passes=passes, remaining_overlaps=overlaps)


def default_node_radius(n: int) -> float:
    """Radius keeping expected node occupancy below about half the unit area."""
    return 0.4 / np.sqrt(max(n, 1))


def geospatial_positions(dataset: Dataset, attribute: str) -> LayoutResult:
    """Use a positional attribute (2D point or curve) as the embedding,
    normalized per axis by the joint bounding box."""
    idx = dataset.attribute_index(attribute)
    schema = dataset.schema[idx]
    if not (schema.kind in (Kind.POINT, Kind.CURVE) and schema.dim == 2):
        raise AnalysisError("layout", f"attribute {attribute!r} is not positional (Point/Curve of dim 2)")
    col = dataset.column(idx)
    if schema.kind is Kind.POINT:
        coords = col  # (n, 2)
        positions = _rescale_unit(coords)
        return LayoutResult(positions=positions, mode="geospatial",
                            iterations=0, energy=0.0)
    flat = col.reshape(-1, 2)
    lo = flat.min(axis=0)
    hi = flat.max(axis=0)
    span = np.where(hi - lo > 1e-12, hi - lo, 1.0)
    polylines = (col - lo) / span
    centered = np.where((hi - lo) > 1e-12, polylines, 0.5)
    return LayoutResult(positions=centered[:, 0, :].copy(), mode="geospatial",
                        iterations=0, energy=0.0, polylines=centered)


def edge_list(similarity: SimilarityMatrix | np.ndarray,
              threshold: float) -> list[tuple[int, int, float]]:
    """Upper-triangle edges with positive similarity >= threshold.

    Rendering only: the threshold never feeds back into forces.
    """
    if not 0.0 <= threshold <= 1.0:
        raise AnalysisError("layout", f"edge threshold must be in [0, 1], got {threshold}")
    values = similarity.values if isinstance(similarity, SimilarityMatrix) else np.asarray(similarity)
    n = values.shape[0]
    out = []
    for i in range(n - 1):
        row = values[i, i + 1:]
        hits = np.nonzero((row >= threshold) & (row > 0.0))[0]
        for j in hits:
            out.append((i, int(i + 1 + j), float(row[j])))
    return out
