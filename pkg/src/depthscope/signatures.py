"""Band-inclusion signatures: the packed inclusion matrix, tau masking, depths.

The inclusion matrix is computed once per (dataset, band plan) and stored
unmasked: bit b of datapoint i says whether point i lies inside band b. Bits
are packed into little-endian 64-bit words per datapoint, so masking by a band
size threshold tau and depth computation are word-parallel popcount passes and
never touch the geometry again.

The builder walks bands in chunks. Within a chunk, cheap attributes (scalars,
category sets, 1D points) are evaluated as full (bands x points) boolean
passes; once the surviving fraction collapses, the remaining attributes are
evaluated only at surviving (band, point) index pairs. This keeps expensive
hull and envelope tests proportional to what the cheap attributes let
through. Chunks own disjoint output rows, which is the only shared state.
"""

from __future__ import annotations

import json
import struct
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import bands as _bands
from .bands import BandPlan
from .dataset import Dataset, Kind
from .errors import AnalysisError

_MAGIC = b"DSIG"
_VERSION = 1
_CHEAP = (Kind.SCALAR, Kind.CATEGORICAL_SET)
_COMPRESS_DENSITY = 0.05


def popcount_rows(words: np.ndarray) -> np.ndarray:
    """Per-row set-bit count of packed uint64 signatures."""
    return np.bitwise_count(words).sum(axis=1, dtype=np.int64)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """(n, B) boolean -> (n, ceil(B/64)) uint64, bit b at position b within
    little-endian words."""
    n, B = bits.shape
    W = (B + 63) // 64
    padded = np.zeros((n, W * 64), dtype=bool)
    padded[:, :B] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    words = packed.view(np.uint64)
    if sys.byteorder != "little":
        words = words.byteswap()
    return np.ascontiguousarray(words)


def unpack_bits(words: np.ndarray, B: int) -> np.ndarray:
    w = words
    if sys.byteorder != "little":
        w = w.byteswap()
    flat = np.unpackbits(w.view(np.uint8), axis=1, bitorder="little")
    return flat[:, :B].astype(bool)


@dataclass(eq=False)
class InclusionMatrix:
    """Unmasked inclusion bits plus band sizes for one (dataset, plan) pair."""

    words: np.ndarray           # (n, W) uint64, bit b = inclusion in band b
    band_sizes: np.ndarray      # (B,) total band sizes
    log_band_sizes: np.ndarray  # (B,) log-space companion (exact for curves)
    band_count: int
    n: int
    plan: BandPlan

    def bit(self, band: int, point: int) -> int:
        w = self.words[point, band >> 6]
        return int((w >> np.uint64(band & 63)) & np.uint64(1))

    def dense(self) -> np.ndarray:
        """(band_count, n) uint8 view for tests and small datasets."""
        return unpack_bits(self.words, self.band_count).T.astype(np.uint8)


@dataclass(eq=False)
class MaskedSignatures:
    """Signatures after applying a band-size threshold tau."""

    words: np.ndarray       # (n, W) masked bits
    mask_words: np.ndarray  # (W,) surviving-band mask
    unmasked_count: int
    tau: float
    band_count: int
    n: int


def _evaluation_order(dataset: Dataset) -> list[int]:
    def cost(a: int) -> tuple:
        s = dataset.schema[a]
        if s.kind in _CHEAP or (s.kind is Kind.POINT and s.dim == 1):
            return (0, a)
        if s.kind is Kind.POINT:
            return (1, a)
        if s.kind is Kind.FUNCTION:
            return (2, a)
        return (3, a)

    return sorted(range(len(dataset.schema)), key=cost)


def _chunk_pair_bits(dataset: Dataset, members: np.ndarray, order: list[int]) -> np.ndarray:
    """(Bc, n) inclusion bits for one chunk of bands."""
    n = dataset.n
    Bc = members.shape[0]
    alive: np.ndarray | None = None
    rows = cols = None
    for pos, a in enumerate(order):
        s = dataset.schema[a]
        col = dataset.column(a)
        if rows is None:
            cheap = s.kind in _CHEAP or (s.kind is Kind.POINT and s.dim == 1)
            if cheap:
                if s.kind is Kind.SCALAR:
                    bits = _bands.full_inclusion_scalarlike(col, members)
                elif s.kind is Kind.CATEGORICAL_SET:
                    bits = _bands.full_inclusion_sets(col, members)
                else:
                    bits = _bands.full_inclusion_scalarlike(col[:, 0], members)
                alive = bits if alive is None else (alive.__iand__(bits))
                last = pos == len(order) - 1
                if not last and np.count_nonzero(alive) < _COMPRESS_DENSITY * alive.size:
                    rows, cols = np.nonzero(alive)
                continue
            # first expensive attribute: switch to pair evaluation
            if alive is None:
                rows, cols = np.divmod(np.arange(Bc * n, dtype=np.int64), n)
            else:
                rows, cols = np.nonzero(alive)
        keep = _pairs_for_kind(s, col, members, rows, cols)
        rows = rows[keep]
        cols = cols[keep]
        if rows.size == 0:
            break
    if rows is None:
        assert alive is not None
        return alive
    out = np.zeros((Bc, n), dtype=bool)
    out[rows, cols] = True
    return out


def _pairs_for_kind(schema, col, members, rows, cols) -> np.ndarray:
    if schema.kind is Kind.SCALAR:
        return _bands.pairs_inclusion_scalarlike(col, members, rows, cols)
    if schema.kind is Kind.CATEGORICAL_SET:
        return _bands.pairs_inclusion_sets(col, members, rows, cols)
    if schema.kind is Kind.POINT:
        return _bands.pairs_inclusion_points(col, members, rows, cols)
    if schema.kind is Kind.FUNCTION:
        return _bands.pairs_inclusion_functions(col, members, rows, cols)
    return _bands.pairs_inclusion_curves(col, members, rows, cols)


def build_inclusion_matrix(dataset: Dataset, plan: BandPlan,
                           progress: Callable[[float], None] | None = None,
                           chunk_bands: int | None = None) -> InclusionMatrix:
    """Evaluate every band against every datapoint and pack the bits."""
    n = dataset.n
    B = plan.band_count
    if chunk_bands is None:
        chunk_bands = max(64, (4_000_000 // max(n, 1)) // 64 * 64)
    W = (B + 63) // 64
    words = np.zeros((n, W), dtype=np.uint64)
    sizes = np.ones(B)
    logs = np.zeros(B)
    order = _evaluation_order(dataset)
    zero_size = np.zeros(B, dtype=bool)

    for start in range(0, B, chunk_bands):
        stop = min(start + chunk_bands, B)
        members = plan.member_indices[start:stop]
        bits = _chunk_pair_bits(dataset, members, order)
        packed = pack_bits(bits.T)  # (n, chunkW)
        words[:, start // 64:start // 64 + packed.shape[1]] = packed
        for a, s in enumerate(dataset.schema):
            a_sizes, a_logs = _bands.attribute_sizes(dataset.column(a), members, s)
            zero_size[start:stop] |= a_sizes == 0.0
            sizes[start:stop] *= a_sizes
            logs[start:stop] += a_logs
        if progress is not None:
            progress(stop / B)

    # zero extent in any attribute wins over an overflowing product
    sizes[zero_size] = 0.0
    logs[np.isnan(logs)] = -np.inf
    return InclusionMatrix(words=words, band_sizes=sizes, log_band_sizes=logs,
                           band_count=B, n=n, plan=plan)


def mask_by_tau(matrix: InclusionMatrix, tau: float) -> MaskedSignatures:
    """Zero out every band whose size exceeds tau. O(bands/64), no geometry."""
    if not (tau >= 0.0) and not np.isinf(tau):
        raise AnalysisError("mask", f"tau must be nonnegative, got {tau}")
    survive = matrix.band_sizes <= tau
    mask = pack_bits(survive[None, :])[0]
    return MaskedSignatures(
        words=matrix.words & mask[None, :],
        mask_words=mask,
        unmasked_count=int(np.count_nonzero(survive)),
        tau=float(tau),
        band_count=matrix.band_count,
        n=matrix.n,
    )


def depth_values(masked: MaskedSignatures) -> np.ndarray:
    """Per-point band depth: fraction of surviving bands containing the point."""
    if masked.unmasked_count == 0:
        raise AnalysisError("depth", "tau below minimum band size")
    return popcount_rows(masked.words) / masked.unmasked_count


def tau_from_quantile(matrix: InclusionMatrix, q: float) -> float:
    """Band-size quantile -> absolute tau (linear interpolation)."""
    if not 0.0 <= q <= 1.0:
        raise AnalysisError("mask", f"tau quantile must be in [0, 1], got {q}")
    return float(np.quantile(matrix.band_sizes, q))


# ---------------------------------------------------------------------------
# Binary snapshot of the inclusion matrix (bit-exact across platforms)
# ---------------------------------------------------------------------------
#
# Layout: magic "DSIG", u32 version, u64 n, u64 band_count, then n*ceil(B/64)
# little-endian uint64 signature words, then band_count f64 sizes, then
# band_count f64 log sizes. The band plan travels in a JSON sidecar.


def write_inclusion_matrix(matrix: InclusionMatrix, path: Path,
                           sidecar: Path | None = None) -> None:
    path = Path(path)
    words = matrix.words if sys.byteorder == "little" else matrix.words.byteswap()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IQQ", _VERSION, matrix.n, matrix.band_count))
        fh.write(words.astype("<u8", copy=False).tobytes())
        fh.write(matrix.band_sizes.astype("<f8", copy=False).tobytes())
        fh.write(matrix.log_band_sizes.astype("<f8", copy=False).tobytes())
    sidecar = sidecar or path.with_suffix(path.suffix + ".plan.json")
    sidecar.write_text(json.dumps(matrix.plan.to_json_obj(), separators=(",", ":")))


def read_inclusion_matrix(path: Path, sidecar: Path | None = None) -> InclusionMatrix:
    path = Path(path)
    raw = path.read_bytes()
    if raw[:4] != _MAGIC:
        raise AnalysisError("snapshot", f"{path} is not an inclusion-matrix file")
    version, n, B = struct.unpack("<IQQ", raw[4:24])
    if version != _VERSION:
        raise AnalysisError("snapshot", f"unsupported version {version}")
    W = (B + 63) // 64
    off = 24
    words = np.frombuffer(raw, dtype="<u8", count=n * W, offset=off).reshape(n, W)
    off += n * W * 8
    sizes = np.frombuffer(raw, dtype="<f8", count=B, offset=off).copy()
    off += B * 8
    logs = np.frombuffer(raw, dtype="<f8", count=B, offset=off).copy()
    words = words.astype(np.uint64)
    sidecar = sidecar or path.with_suffix(path.suffix + ".plan.json")
    plan = BandPlan.from_json_obj(json.loads(sidecar.read_text()))
    return InclusionMatrix(words=words, band_sizes=sizes, log_band_sizes=logs,
                           band_count=int(B), n=int(n), plan=plan)
