import json

import numpy as np
import pytest

from depthscope import (Bimodal1D, CurveEnsemble, Dataset, DatasetFormat,
                        IngestError, Kind, Unimodal1D, generate_mixed,
                        generate_synthetic, parse_dataset, serialize_dataset)
from depthscope.dataset import AttributeSchema


def test_parse_json_two_scalars_three_rows():
    payload = {
        "schema": [{"name": "a", "kind": "scalar"}, {"name": "b", "kind": "scalar"}],
        "rows": [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]],
    }
    d = parse_dataset(json.dumps(payload).encode())
    assert d.n == 3
    assert len(d.schema) == 2
    assert d.points[1] == (3.0, 4.0)


def test_csv_unknown_category_is_rejected():
    schema = json.dumps({"schema": [
        {"name": "tag", "kind": "categorical_set", "universe": ["a", "b", "c"]}]})
    csv = b"tag\na\nz\nb\n"
    with pytest.raises(IngestError, match="unknown category"):
        parse_dataset(csv, DatasetFormat.CSV_WITH_SCHEMA, schema.encode())


def test_csv_round_trip_scalar_and_categorical():
    schema_obj = {"schema": [
        {"name": "x", "kind": "scalar"},
        {"name": "tag", "kind": "categorical_set", "universe": ["a", "b"]}]}
    csv = b"x,tag\n1.5,a\n2.5,a|b\n3.5,b\n"
    d = parse_dataset(csv, DatasetFormat.CSV_WITH_SCHEMA, json.dumps(schema_obj).encode())
    assert d.n == 3
    assert d.points[1] == (2.5, frozenset({"a", "b"}))


def test_csv_rejects_function_kinds():
    schema = json.dumps({"schema": [
        {"name": "f", "kind": "function", "grid": [0.0, 1.0]}]})
    with pytest.raises(IngestError, match="not representable"):
        parse_dataset(b"f\n", DatasetFormat.CSV_WITH_SCHEMA, schema.encode())


def test_mushroom_style_23_attributes():
    d = generate_mixed(40, seed=3, n_scalar=4, n_categorical=19)
    assert len(d.schema) == 23
    kinds = {s.kind for s in d.schema}
    assert kinds == {Kind.SCALAR, Kind.CATEGORICAL_SET}
    again = parse_dataset(serialize_dataset(d))
    assert again.schema == d.schema
    assert again.points == d.points


@pytest.mark.parametrize("dataset", [
    generate_synthetic(Unimodal1D(10), seed=1),
    generate_synthetic(Bimodal1D(12), seed=2),
    generate_synthetic(CurveEnsemble(6, time_points=5), seed=3),
    generate_mixed(8, seed=4, n_scalar=2, n_categorical=2, n_point=1,
                   n_function=1, n_curve=1),
])
def test_serialize_parse_round_trip_is_exact(dataset):
    again = parse_dataset(serialize_dataset(dataset))
    assert again.id == dataset.id
    assert again.schema == dataset.schema
    assert again.points == dataset.points
    assert again.labels == dataset.labels
    assert again.metadata == dataset.metadata


def test_generate_synthetic_is_pure():
    a = generate_synthetic(Bimodal1D(30), seed=9)
    b = generate_synthetic(Bimodal1D(30), seed=9)
    c = generate_synthetic(Bimodal1D(30), seed=10)
    assert a.points == b.points
    assert a.points != c.points


def test_unimodal_labels_all_zero():
    d = generate_synthetic(Unimodal1D(99, 0.0, 1.0), seed=7)
    assert d.n == 99
    assert set(d.metadata["ground_truth_labels"]) == {0}


def test_bimodal_has_two_label_values():
    d = generate_synthetic(Bimodal1D(99), seed=7)
    assert d.n == 99
    assert set(d.metadata["ground_truth_labels"]) == {0, 1}
    values = np.array([row[0] for row in d.points])
    labels = np.array(d.metadata["ground_truth_labels"])
    assert values[labels == 0].mean() < values[labels == 1].mean()


def test_curve_ensemble_shape():
    d = generate_synthetic(CurveEnsemble(21, 60, 2), seed=1)
    assert d.n == 21
    track = d.schema[0]
    assert track.kind is Kind.CURVE
    assert track.time_points == 60
    assert all(len(row[0]) == 60 for row in d.points)
    # four values per time point: x, y, wind, pressure
    assert len(d.schema) == 3
    assert {s.kind for s in d.schema[1:]} == {Kind.FUNCTION}


def test_generator_rejects_bad_sizes():
    with pytest.raises(IngestError):
        generate_synthetic(Unimodal1D(0), seed=1)
    with pytest.raises(IngestError):
        generate_synthetic(Bimodal1D(10, means=(), sds=(), mixture=0.5), seed=1)


@pytest.mark.parametrize("schema_kwargs", [
    dict(kind=Kind.POINT, dim=4),
    dict(kind=Kind.POINT, dim=0),
    dict(kind=Kind.CATEGORICAL_SET, universe=("a", "a")),
    dict(kind=Kind.CATEGORICAL_SET, universe=()),
    dict(kind=Kind.FUNCTION, grid=(1.0, 1.0)),
    dict(kind=Kind.FUNCTION, grid=(2.0,)),
    dict(kind=Kind.CURVE, dim=2, time_points=1),
])
def test_schema_invariants_rejected(schema_kwargs):
    with pytest.raises(IngestError):
        AttributeSchema(name="bad", **schema_kwargs)


def test_dataset_needs_three_points():
    s = (AttributeSchema("x", Kind.SCALAR),)
    with pytest.raises(IngestError, match="at least 3"):
        Dataset(id="d", schema=s, points=((1.0,), (2.0,)))


def test_ragged_function_rejected():
    payload = {
        "schema": [{"name": "f", "kind": "function", "grid": [0.0, 1.0, 2.0]}],
        "rows": [[[0.0, 1.0, 2.0]], [[0.0, 1.0]], [[1.0, 1.0, 1.0]]],
    }
    with pytest.raises(IngestError, match="ragged"):
        parse_dataset(json.dumps(payload).encode())


def test_missing_value_rejected():
    payload = {
        "schema": [{"name": "x", "kind": "scalar"}],
        "rows": [[1.0], [None], [3.0]],
    }
    with pytest.raises(IngestError, match="missing"):
        parse_dataset(json.dumps(payload).encode())


def test_labels_length_mismatch():
    payload = {
        "schema": [{"name": "x", "kind": "scalar"}],
        "rows": [[1.0], [2.0], [3.0]],
        "labels": ["a", "b"],
    }
    with pytest.raises(IngestError, match="labels"):
        parse_dataset(json.dumps(payload).encode())


def test_subsample_is_seeded_and_uniform():
    from depthscope.dataset import subsample

    d = generate_mixed(50, seed=1, n_scalar=2, n_categorical=3)
    sub = subsample(d, 10, seed=4)
    assert sub.n == 10
    assert sub.schema == d.schema
    assert all(row in d.points for row in sub.points)
    assert len(sub.metadata["ground_truth_labels"]) == 10
    again = subsample(d, 10, seed=4)
    assert again.points == sub.points
    other = subsample(d, 10, seed=5)
    assert other.points != sub.points
    with pytest.raises(IngestError):
        subsample(d, 2, seed=0)
    with pytest.raises(IngestError):
        subsample(d, 51, seed=0)


def test_categorical_column_packs_bits():
    d = generate_mixed(10, seed=0, n_scalar=0, n_categorical=1)
    col = d.column(0)
    assert col.dtype == np.uint64
    universe = d.schema[0].universe
    for i, row in enumerate(d.points):
        for j, label in enumerate(universe):
            bit = int(col[i, j >> 6] >> np.uint64(j & 63)) & 1
            assert bit == (label in row[0])
