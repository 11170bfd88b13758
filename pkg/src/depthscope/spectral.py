"""Spectral analysis of the similarity graph.

Normalized graph Laplacian, a dense symmetric eigensolver (cyclic Jacobi for
small matrices, LAPACK beyond), Fiedler bipartition, k-means over the spectral
embedding, an eigengap-based cluster-count suggestion, and the heatmap
reordering permutation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import AnalysisError
from .similarity import SimilarityMatrix

JACOBI_TOL = 1e-10
JACOBI_MAX_SWEEPS = 100
_JACOBI_MAX_N = 128  # above this, cyclic Jacobi costs more than its worth vs LAPACK
_NEAR_ZERO_EIGENVALUE = 0.1
_GAP_PROMINENCE = 5.0


@dataclass(eq=False)
class SpectralResult:
    eigenvalues: np.ndarray        # ascending, length n
    embedding: np.ndarray          # (n, k), rows L2-normalized
    labels: np.ndarray             # (n,) cluster ids
    suggested_k: int
    suggestion_confidence: float   # chosen eigengap / largest eigengap
    order: np.ndarray              # heatmap permutation of [0, n)
    fiedler: np.ndarray            # second-smallest eigenvector (0 for isolated)
    k: int

    def to_json_obj(self) -> dict:
        return {
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "labels": [int(v) for v in self.labels],
            "order": [int(v) for v in self.order],
            "k": self.k,
            "suggested_k": self.suggested_k,
            "suggestion_confidence": float(self.suggestion_confidence),
        }


def graph_laplacian(values: np.ndarray) -> np.ndarray:
    """L = I - D^(-1/2) S D^(-1/2) with d_i the i-th row sum.

    Zero-degree vertices are excluded: their rows and columns are zero, which
    block-extends L and leaves one zero eigenvalue per isolated vertex.
    """
    S = np.asarray(values, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise AnalysisError("spectral", "similarity matrix must be square")
    d = S.sum(axis=1)
    inv_sqrt = np.zeros_like(d)
    active = d > 0
    inv_sqrt[active] = 1.0 / np.sqrt(d[active])
    L = -S * inv_sqrt[:, None] * inv_sqrt[None, :]
    np.fill_diagonal(L, 0.0)
    L[active, active] = 1.0 - S[active, active] * inv_sqrt[active] ** 2
    return (L + L.T) / 2.0


@njit(cache=True)
def _jacobi_sweeps(A, V, tol, max_sweeps):
    n = A.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += A[i, j] * A[i, j]
        if np.sqrt(2.0 * off) < tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                app = A[p, p]
                aqq = A[q, q]
                for i in range(n):
                    aip = A[i, p]
                    aiq = A[i, q]
                    A[i, p] = aip * c - aiq * s
                    A[i, q] = aiq * c + aip * s
                for i in range(n):
                    api = A[p, i]
                    aqi = A[q, i]
                    A[p, i] = api * c - aqi * s
                    A[q, i] = aqi * c + api * s
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                for i in range(n):
                    vip = V[i, p]
                    viq = V[i, q]
                    V[i, p] = vip * c - viq * s
                    V[i, q] = viq * c + vip * s
    return -1


def jacobi_eigh(L: np.ndarray, tol: float = JACOBI_TOL,
                max_sweeps: int = JACOBI_MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotation eigensolver for symmetric matrices."""
    A = np.array(L, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    sweeps = _jacobi_sweeps(A, V, tol, max_sweeps)
    if sweeps < 0:
        raise AnalysisError("spectral", f"Jacobi failed to converge in {max_sweeps} sweeps")
    return np.diag(A).copy(), V


def eigendecompose(L: np.ndarray, method: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues ascending and orthonormal eigenvectors (as columns).

    Sign convention: each eigenvector's largest-magnitude component (first on
    ties) is made positive, so results are deterministic across backends.
    """
    L = np.asarray(L, dtype=float)
    n = L.shape[0]
    if method == "auto":
        method = "jacobi" if n <= _JACOBI_MAX_N else "lapack"
    if method == "jacobi":
        w, V = jacobi_eigh(L)
    elif method == "lapack":
        w, V = np.linalg.eigh(L)
    else:
        raise AnalysisError("spectral", f"unknown eigensolver {method!r}")
    idx = np.argsort(w, kind="stable")
    w = w[idx]
    V = V[:, idx]
    for j in range(n):
        col = V[:, j]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            V[:, j] = -col
    return w, V


def bipartition(fiedler: np.ndarray) -> np.ndarray:
    """Sign cut of the Fiedler vector; zeros go with the positive side."""
    return (np.asarray(fiedler) < 0).astype(np.int64)


def suggest_k(eigenvalues: np.ndarray) -> tuple[int, float]:
    """Eigengap heuristic over the first min(n, 10) eigenvalues.

    Returns (k, confidence in (0, 1], the margin against the decision
    threshold). Two regimes:

    * Near-disconnected graphs carry one extra near-zero eigenvalue per
      additional component, so k = 1 + count of near-zero eigenvalues beyond
      the first. A spectrum that is near-zero throughout is the degenerate
      fully-disconnected case and reports k = 1.
    * Connected similarity graphs from masked signatures never produce
      near-zero cut eigenvalues: shared empty signature positions put a high
      floor under every pairwise similarity, and at tau = +inf the matrix is a
      rank-distance kernel whose spectrum arrives in near-degenerate pairs
      regardless of modality. What distinguishes a genuine two-mode split is
      the second eigenvalue sitting isolated below that pair bulk, so k = 2 is
      reported when the gap above lambda_2 dominates the remaining gaps by
      _GAP_PROMINENCE, and k = 1 (no structure) otherwise.
    """
    lam = np.asarray(eigenvalues, dtype=float)[:min(len(eigenvalues), 10)]
    if lam.size < 2:
        return 1, 1.0
    if lam[-1] < _NEAR_ZERO_EIGENVALUE:
        return 1, 1.0
    near_zero = int(np.count_nonzero(lam[1:] < _NEAR_ZERO_EIGENVALUE))
    if near_zero >= 1:
        return near_zero + 1, 1.0
    if lam.size < 3:
        return 2, 0.5
    gaps = np.diff(lam)
    rest = gaps[2:]
    denom = max(float(rest.max()) if rest.size else 0.0, 1e-12)
    prominence = float(gaps[1]) / denom
    if prominence >= _GAP_PROMINENCE:
        return 2, min(1.0, prominence / (2.0 * _GAP_PROMINENCE))
    return 1, min(1.0, _GAP_PROMINENCE / max(prominence, 1e-12) / 2.0)


def reorder(labels: np.ndarray, fiedler: np.ndarray) -> np.ndarray:
    """Heatmap permutation: sort by (cluster label, Fiedler value, index)."""
    n = len(labels)
    return np.lexsort((np.arange(n), np.asarray(fiedler), np.asarray(labels)))


# ---------------------------------------------------------------------------
# k-means over the spectral embedding
# ---------------------------------------------------------------------------


def _kmeans_once(X: np.ndarray, k: int, rng: np.random.Generator,
                 max_iter: int) -> tuple[np.ndarray, float]:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    # k-means++ seeding
    first = int(rng.integers(n))
    centers[0] = X[first]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[c:] = X[int(rng.integers(n))]
            break
        probs = d2 / total
        pick = int(rng.choice(n, p=probs))
        centers[c] = X[pick]
        d2 = np.minimum(d2, ((X - centers[c]) ** 2).sum(axis=1))
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        dists = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = dists.argmin(axis=1)
        for c in range(k):
            members = new_labels == c
            if members.any():
                centers[c] = X[members].mean(axis=0)
            else:
                # deterministically hand the worst-fit point to the empty cluster
                far = int(dists[np.arange(n), new_labels].argmax())
                new_labels[far] = c
                centers[c] = X[far]
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    wcss = float(((X - centers[labels]) ** 2).sum())
    return labels, wcss


def _relabel(labels: np.ndarray, k: int) -> np.ndarray:
    """Deterministic ids: ascending cluster size, ties by first occurrence."""
    sizes = np.bincount(labels, minlength=k)
    first = np.full(k, np.iinfo(np.int64).max, dtype=np.int64)
    for i, c in enumerate(labels):
        if first[c] == np.iinfo(np.int64).max:
            first[c] = i
    order = sorted(range(k), key=lambda c: (sizes[c], first[c]))
    mapping = np.empty(k, dtype=np.int64)
    for new, old in enumerate(order):
        mapping[old] = new
    return mapping[labels]


def kway_cluster(embedding: np.ndarray, k: int, seed: int = 0,
                 restarts: int = 10, max_iter: int = 100) -> np.ndarray:
    """k-means with k-means++ seeding, best of `restarts` by WCSS."""
    X = np.asarray(embedding, dtype=float)
    n = X.shape[0]
    if not 2 <= k <= n:
        raise AnalysisError("spectral", f"k must be in [2, {n}], got {k}")
    rng = np.random.default_rng(seed)
    best_labels = None
    best_wcss = np.inf
    for _ in range(restarts):
        labels, wcss = _kmeans_once(X, k, rng, max_iter)
        if wcss < best_wcss - 1e-15:
            best_wcss = wcss
            best_labels = labels
    assert best_labels is not None
    return _relabel(best_labels, k)


def row_normalize(V: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(V, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return V / norms


def spectral_analysis(similarity: SimilarityMatrix, k: int | None = None,
                      seed: int = 0, method: str = "auto") -> SpectralResult:
    """Full spectral pass over a similarity matrix.

    Zero-degree vertices are excluded from the Laplacian and appended as
    singleton clusters after the k-way labels; with the unit-diagonal
    similarity of this pipeline they cannot occur, but the contract holds for
    arbitrary nonnegative symmetric input.
    """
    S = similarity.values
    n = S.shape[0]
    d = S.sum(axis=1)
    active = np.nonzero(d > 0)[0]
    isolated = np.nonzero(d <= 0)[0]
    A = S[np.ix_(active, active)]
    L = graph_laplacian(A)
    w, V = eigendecompose(L, method=method)

    suggested, confidence = suggest_k(w)
    k_used = suggested if k is None else int(k)
    if not 1 <= k_used <= max(len(active), 1):
        raise AnalysisError("spectral", f"k must be in [1, {len(active)}], got {k_used}")

    fiedler = np.zeros(n)
    if len(active) >= 2:
        fiedler[active] = V[:, 1]

    k_embed = max(k_used, 1)
    embedding_active = row_normalize(V[:, :k_embed])
    embedding = np.zeros((n, k_embed))
    embedding[active] = embedding_active

    labels = np.zeros(n, dtype=np.int64)
    if k_used >= 2 and len(active) >= 2:
        labels[active] = kway_cluster(embedding_active, k_used, seed=seed)
    for j, i in enumerate(sorted(isolated)):
        labels[i] = k_used + j

    eigenvalues = np.sort(np.concatenate([w, np.zeros(len(isolated))]))
    order = reorder(labels, fiedler)
    return SpectralResult(
        eigenvalues=eigenvalues,
        embedding=embedding,
        labels=labels,
        suggested_k=suggested,
        suggestion_confidence=confidence,
        order=order,
        fiedler=fiedler,
        k=k_used,
    )
