"""Pairwise similarity between masked band-inclusion signatures.

Similarity is 1 minus the normalized hamming distance between two signatures,
with the denominator being the number of surviving (unmasked) bands. The
pairwise pass is a word-parallel XOR + popcount over the packed signatures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AnalysisError
from .signatures import MaskedSignatures, popcount_rows


@dataclass(eq=False)
class SimilarityMatrix:
    """Symmetric n x n similarity values in [0, 1], unit diagonal."""

    values: np.ndarray
    tau: float
    unmasked_band_count: int

    @property
    def n(self) -> int:
        return self.values.shape[0]


def hamming_distance(a: Sequence[int], b: Sequence[int]) -> int:
    """Number of positions at which two equal-length bit vectors differ."""
    av = np.asarray(a)
    bv = np.asarray(b)
    if av.shape != bv.shape:
        raise AnalysisError("similarity", f"signature length mismatch: {av.shape} vs {bv.shape}")
    return int(np.count_nonzero(av.astype(bool) ^ bv.astype(bool)))


def similarity_matrix(masked: MaskedSignatures, mode: str = "hamming") -> SimilarityMatrix:
    """Similarity from masked signatures.

    The default mode is the normalized-hamming definition applied literally:
    two all-zero signatures come out fully similar, and such points surface via
    the zero-depth outlier path instead. The optional "jaccard" mode restricts
    the distance to positions where either signature has a 1, which makes
    near-empty signatures dissimilar; it is off by default and not used by the
    pipeline.
    """
    if masked.unmasked_count == 0:
        raise AnalysisError("similarity", "tau below minimum band size")
    n = masked.n
    X = masked.words
    values = np.ones((n, n))
    if mode == "hamming":
        denom = masked.unmasked_count
        for i in range(n - 1):
            diff = np.bitwise_count(X[i] ^ X[i + 1:]).sum(axis=1, dtype=np.int64)
            sim = 1.0 - diff / denom
            values[i, i + 1:] = sim
            values[i + 1:, i] = sim
    elif mode == "jaccard":
        for i in range(n - 1):
            diff = np.bitwise_count(X[i] ^ X[i + 1:]).sum(axis=1, dtype=np.int64)
            union = np.bitwise_count(X[i] | X[i + 1:]).sum(axis=1, dtype=np.int64)
            with np.errstate(invalid="ignore"):
                sim = np.where(union > 0, 1.0 - diff / np.maximum(union, 1), 0.0)
            values[i, i + 1:] = sim
            values[i + 1:, i] = sim
    else:
        raise AnalysisError("similarity", f"unknown mode {mode!r}")
    return SimilarityMatrix(values=values, tau=masked.tau,
                            unmasked_band_count=masked.unmasked_count)


def signature_bit_counts(masked: MaskedSignatures) -> np.ndarray:
    """Nonzero count per signature; used for isolation checks and coloring."""
    return popcount_rows(masked.words)


def _f32(v: float) -> float:
    """Shortest decimal that round-trips the value at float32 precision."""
    return float(np.format_float_positional(np.float32(v), trim="-"))


def tau_json(tau: float) -> float | None:
    """Unrestricted tau (+inf) crosses the wire as null: strict JSON has no
    Infinity literal."""
    return None if np.isinf(tau) else float(tau)


def similarity_to_json_obj(matrix: SimilarityMatrix, order: Sequence[int]) -> dict:
    return {
        "tau": tau_json(matrix.tau),
        "order": [int(i) for i in order],
        "values": [[_f32(v) for v in row] for row in matrix.values],
    }


def similarity_to_csv(matrix: SimilarityMatrix) -> str:
    lines = []
    for row in matrix.values:
        lines.append(",".join(np.format_float_positional(np.float32(v), trim="-")
                              for v in row))
    return "\n".join(lines) + "\n"
