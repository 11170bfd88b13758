import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depthscope import AnalysisError
from depthscope.bands import plan_bands
from depthscope.dataset import AttributeSchema, Dataset, Kind
from depthscope.signatures import build_inclusion_matrix, mask_by_tau, pack_bits, MaskedSignatures
from depthscope.similarity import (hamming_distance, similarity_matrix,
                                   similarity_to_csv, similarity_to_json_obj)


def masked_from_bits(bits: np.ndarray, tau: float = np.inf) -> MaskedSignatures:
    bits = np.asarray(bits, dtype=bool)
    n, B = bits.shape
    words = pack_bits(bits)
    mask = pack_bits(np.ones((1, B), dtype=bool))[0]
    return MaskedSignatures(words=words, mask_words=mask, unmasked_count=B,
                            tau=tau, band_count=B, n=n)


def scalar_masked(values, tau=np.inf):
    schema = (AttributeSchema("x", Kind.SCALAR),)
    d = Dataset(id="t", schema=schema, points=tuple((float(v),) for v in values))
    m = build_inclusion_matrix(d, plan_bands(d, seed=0))
    return mask_by_tau(m, tau)


def test_hamming_examples():
    assert hamming_distance((1, 1, 0), (1, 0, 0)) == 1
    assert hamming_distance((1, 1, 0), (1, 1, 0)) == 0
    assert hamming_distance((1, 1, 1, 1), (0, 0, 0, 0)) == 4
    with pytest.raises(AnalysisError, match="length mismatch"):
        hamming_distance((1, 0), (1, 0, 0))


def test_three_scalar_similarity_by_hand():
    masked = scalar_masked([1.0, 2.0, 3.0])
    S = similarity_matrix(masked)
    # signatures: p0=(1,1,0), p2=(0,1,1) -> hamming 2 of 3
    assert np.isclose(S.values[0, 2], 1 / 3)
    assert np.isclose(S.values[0, 1], 2 / 3)
    assert np.all(np.diag(S.values) == 1.0)


def test_identical_points_fully_similar():
    masked = scalar_masked([2.0, 2.0, 5.0, 9.0])
    S = similarity_matrix(masked)
    assert S.values[0, 1] == 1.0


def test_errors_when_nothing_survives():
    masked = scalar_masked([1.0, 2.0, 4.0], tau=0.5)
    with pytest.raises(AnalysisError, match="tau below minimum band size"):
        similarity_matrix(masked)


def test_word_parallel_matches_naive_loop():
    rng = np.random.default_rng(21)
    bits = rng.random((16, 200)) < 0.3
    S = similarity_matrix(masked_from_bits(bits))
    pairs = rng.integers(0, 16, size=(100, 2))
    for i, j in pairs:
        naive = int(np.count_nonzero(bits[i] ^ bits[j]))
        assert np.isclose(S.values[i, j], 1 - naive / 200)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_one_minus_similarity_is_pseudometric(seed):
    rng = np.random.default_rng(seed)
    bits = rng.random((8, 60)) < 0.5
    D = 1.0 - similarity_matrix(masked_from_bits(bits)).values
    assert np.allclose(D, D.T)
    assert np.all(np.diag(D) == 0.0)
    for i in range(8):
        for j in range(8):
            for k in range(8):
                assert D[i, k] <= D[i, j] + D[j, k] + 1e-12


def test_permutation_equivariance():
    rng = np.random.default_rng(3)
    bits = rng.random((10, 80)) < 0.4
    S = similarity_matrix(masked_from_bits(bits)).values
    perm = rng.permutation(10)
    S_perm = similarity_matrix(masked_from_bits(bits[perm])).values
    assert np.allclose(S_perm, S[np.ix_(perm, perm)])


def test_all_zero_signatures_follow_the_formula():
    bits = np.zeros((3, 40), dtype=bool)
    bits[2, :10] = True
    S = similarity_matrix(masked_from_bits(bits)).values
    assert S[0, 1] == 1.0          # formula applied literally
    assert np.isclose(S[0, 2], 1 - 10 / 40)


def test_jaccard_mode_demotes_near_empty_pairs():
    bits = np.zeros((4, 40), dtype=bool)
    bits[0, :20] = True
    bits[1, :20] = True
    bits[3, 5] = True
    S = similarity_matrix(masked_from_bits(bits), mode="jaccard").values
    assert S[0, 1] == 1.0          # identical nonempty signatures
    assert S[2, 3] == 0.0          # empty vs near-empty share nothing
    assert S[0, 2] == 0.0
    assert np.all(np.diag(S) == 1.0)
    with pytest.raises(AnalysisError, match="unknown mode"):
        similarity_matrix(masked_from_bits(bits), mode="cosine")


def test_values_in_unit_interval():
    rng = np.random.default_rng(5)
    bits = rng.random((12, 90)) < 0.5
    S = similarity_matrix(masked_from_bits(bits)).values
    assert np.all((S >= 0.0) & (S <= 1.0))


def test_export_formats():
    masked = scalar_masked([1.0, 2.0, 3.0])
    S = similarity_matrix(masked)
    obj = similarity_to_json_obj(S, order=[2, 1, 0])
    assert obj["order"] == [2, 1, 0]
    assert obj["values"][0][0] == 1.0
    assert np.isclose(obj["values"][0][2], 1 / 3, atol=1e-6)
    csv = similarity_to_csv(S)
    lines = csv.strip().splitlines()
    assert len(lines) == 3
    cells = lines[0].split(",")
    assert cells[0] == "1"
    assert float(cells[2]) == pytest.approx(1 / 3, abs=1e-6)
