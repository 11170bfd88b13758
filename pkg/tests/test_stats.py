import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from depthscope import AnalysisError, generate_mixed
from depthscope.dataset import AttributeSchema, Dataset, Kind
from depthscope.stats import (attribute_summaries, band_size_histogram,
                              color_bins, five_number, rankdata,
                              spearman_rank_correlation, tukey_outliers)


def test_color_bins_ten_distinct():
    depths = np.linspace(1.0, 0.1, 10)  # descending by index
    coloring = color_bins(depths)
    assert coloring.counts() == [2, 2, 4, 2]
    assert coloring.bins[:2].tolist() == [0, 0]
    assert coloring.bins[-2:].tolist() == [3, 3]


def test_color_bins_all_equal_resolved_by_index():
    coloring = color_bins(np.full(10, 0.5))
    assert coloring.bins.tolist() == [0, 0, 1, 1, 2, 2, 2, 2, 3, 3]


def test_color_bins_exact_quantiles_at_100():
    coloring = color_bins(np.linspace(0, 1, 100))
    assert coloring.counts() == [20, 20, 40, 20]


def test_color_bins_monotone_in_depth():
    rng = np.random.default_rng(0)
    depths = rng.random(37)
    coloring = color_bins(depths)
    order = np.argsort(-depths, kind="stable")
    assert np.all(np.diff(coloring.bins[order]) >= 0)


def test_color_bins_needs_five():
    with pytest.raises(AnalysisError):
        color_bins(np.array([1.0, 0.5, 0.2, 0.1]))


def test_tukey_flags_low_depth():
    flags = tukey_outliers(np.array([0.9, 0.85, 0.8, 0.05]))
    assert flags.is_outlier.tolist() == [False, False, False, True]
    q1, q3 = np.quantile([0.9, 0.85, 0.8, 0.05], [0.25, 0.75])
    assert np.isclose(flags.lower_fence, q1 - 1.5 * (q3 - q1))


def test_tukey_uniform_depths_no_flags():
    flags = tukey_outliers(np.linspace(0.2, 0.8, 20))
    assert not flags.is_outlier.any()


def test_tukey_zero_depth_always_flagged():
    flags = tukey_outliers(np.array([0.9, 0.9, 0.9, 0.9, 0.0]))
    assert flags.is_outlier.tolist() == [False, False, False, False, True]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 10.0), st.floats(-5.0, 5.0))
def test_tukey_invariant_under_positive_affine_maps(seed, scale, shift):
    # value-based Tukey fences are not invariant under arbitrary monotone
    # maps (a piecewise-linear map can pull the minimum inside the fence);
    # positive affine maps are the invariance the rule actually has
    rng = np.random.default_rng(seed)
    depths = rng.random(20)
    base = tukey_outliers(depths).is_outlier
    mapped = tukey_outliers(depths * scale + shift).is_outlier
    assert np.array_equal(base, mapped)


def test_histogram_single_value():
    hist = band_size_histogram(np.array([1.0, 1.0, 1.0]))
    assert hist.counts.sum() == 3
    assert np.count_nonzero(hist.counts) == 1


def test_histogram_uniform_counts_within_tolerance():
    rng = np.random.default_rng(1)
    sizes = rng.random(50_000)
    hist = band_size_histogram(sizes, bins=10)
    assert hist.counts.sum() == 50_000
    expected = 5_000
    sigma = np.sqrt(50_000 * 0.1 * 0.9)
    assert np.all(np.abs(hist.counts - expected) < 4 * sigma)


def test_histogram_quantiles_are_slider_snap_points():
    sizes = np.arange(101, dtype=float)
    hist = band_size_histogram(sizes)
    assert hist.quantiles[0] == 0.0
    assert hist.quantiles[-1] == 100.0
    assert hist.quantiles[50] == 50.0
    assert len(hist.quantiles) == 101


def test_histogram_log_scale():
    sizes = np.array([0.001, 0.01, 0.1, 1.0, 10.0, 100.0])
    hist = band_size_histogram(sizes, bins=5, log_scale=True)
    assert hist.counts.sum() == 6
    assert hist.log_scale


def test_histogram_claims_nonfinite_sizes():
    sizes = np.array([1.0, 2.0, np.inf, 3.0])
    hist = band_size_histogram(sizes)
    assert hist.counts.sum() == 4


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(0, 1e6), min_size=1, max_size=300),
       st.integers(2, 80))
def test_histogram_counts_always_sum_to_band_count(sizes, bins):
    hist = band_size_histogram(np.array(sizes), bins=bins)
    assert hist.counts.sum() == len(sizes)


def test_large_band_volumes_are_reachable_slider_values():
    # mushroom-scale categorical products reach the thousands; any value inside
    # [min, max] band size is selectable as an absolute tau
    from depthscope.bands import plan_bands
    from depthscope.signatures import build_inclusion_matrix

    d = generate_mixed(30, seed=8, n_scalar=1, n_categorical=6)
    matrix = build_inclusion_matrix(d, plan_bands(d, seed=0))
    hist = band_size_histogram(matrix.band_sizes)
    assert hist.quantiles[0] <= 1771.0 <= hist.quantiles[-1]


def test_scalar_summary_quantile_convention():
    schema = (AttributeSchema("x", Kind.SCALAR),)
    d = Dataset(id="t", schema=schema,
                points=tuple((float(v),) for v in range(1, 101)))
    coloring = color_bins(np.linspace(1, 0, 100))
    (summary,) = attribute_summaries(d, coloring)
    assert summary.five_num == [1.0, 25.75, 50.5, 75.25, 100.0]
    assert summary.outlier_indices == []


def test_categorical_summary_stacks_by_bin():
    schema = (AttributeSchema("tag", Kind.CATEGORICAL_SET, universe=("a", "b")),)
    d = Dataset(id="t", schema=schema,
                points=tuple((frozenset({"a"}),) for _ in range(10)))
    coloring = color_bins(np.linspace(1, 0, 10))
    (summary,) = attribute_summaries(d, coloring)
    assert sum(summary.stacked["a"]) == 10
    assert summary.stacked["a"] == [2, 2, 4, 2]
    assert summary.stacked["b"] == [0, 0, 0, 0]


def test_function_and_curve_summaries_are_pointwise():
    d = generate_mixed(10, seed=5, n_scalar=0, n_categorical=0, n_function=1,
                       n_curve=1, grid_len=7, curve_len=4)
    coloring = color_bins(np.linspace(1, 0, 10))
    fn, curve = attribute_summaries(d, coloring)
    assert len(fn.pointwise) == 7
    assert all(len(q) == 5 for q in fn.pointwise)
    assert len(curve.pointwise) == 4
    assert all(len(per_dim) == 2 for per_dim in curve.pointwise)
    assert all(len(q) == 5 for per_dim in curve.pointwise for q in per_dim)


def test_five_number_matches_numpy():
    rng = np.random.default_rng(3)
    v = rng.normal(0, 1, 57)
    assert five_number(v) == [float(x) for x in np.quantile(v, [0, 0.25, 0.5, 0.75, 1.0])]


def test_rankdata_matches_scipy_with_ties():
    rng = np.random.default_rng(4)
    v = np.round(rng.normal(0, 1, 60), 1)  # force ties
    assert np.allclose(rankdata(v), scipy.stats.rankdata(v))


def test_spearman_matches_scipy():
    rng = np.random.default_rng(5)
    a = rng.normal(0, 1, 50)
    b = a + rng.normal(0, 0.5, 50)
    want = scipy.stats.spearmanr(a, b).statistic
    assert np.isclose(spearman_rank_correlation(a, b), want, atol=1e-12)
    ties_a = np.round(a, 1)
    ties_b = np.round(b, 1)
    want_ties = scipy.stats.spearmanr(ties_a, ties_b).statistic
    assert np.isclose(spearman_rank_correlation(ties_a, ties_b), want_ties, atol=1e-12)
