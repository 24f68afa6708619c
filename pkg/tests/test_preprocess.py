import numpy as np
import pytest

from scoreloop import (
    DataError,
    fit_preprocessor,
    state_from_json,
    state_to_json,
    transform,
    transform_dataset,
)
from scoreloop.schema import CATEGORICAL, NUMERIC, Column, Dataset, FeatureSchema, StudentRecord

TOY = FeatureSchema(
    columns=(
        Column("level", CATEGORICAL),
        Column("x", NUMERIC),
    ),
    target_name="score",
)


def toy_dataset(cells, targets=None):
    rows = tuple(
        StudentRecord(id=f"r{i}", values=tuple(v),
                      target=None if targets is None else targets[i])
        for i, v in enumerate(cells)
    )
    return Dataset(schema=TOY, rows=rows)


def test_lexicographic_codes():
    ds = toy_dataset([["Low", 1.0], ["Medium", 2.0], ["High", 3.0]])
    state = fit_preprocessor(ds)
    assert state.encoders["level"] == {"High": 0, "Low": 1, "Medium": 2}


def test_median_imputation_value():
    ds = toy_dataset([["A", 1.0], ["A", 2.0], ["A", 100.0], ["A", None]])
    state = fit_preprocessor(ds)
    assert state.imputation["x"] == 2.0


def test_population_std():
    ds = toy_dataset([["A", 1.0], ["A", 2.0], ["A", 3.0]])
    state = fit_preprocessor(ds)
    mean, std = state.scaler["x"]
    assert mean == 2.0
    assert std == pytest.approx(0.8164965809277260, abs=1e-12)
    fv = transform(StudentRecord(id="q", values=("A", 3.0)), state)
    assert fv.values[1] == pytest.approx(1.2247448713915890, abs=1e-12)


def test_mean_record_scales_to_zero():
    ds = toy_dataset([["A", 1.0], ["A", 2.0], ["A", 3.0]])
    state = fit_preprocessor(ds)
    fv = transform(StudentRecord(id="q", values=("A", 2.0)), state)
    assert fv.values[1] == 0.0


def test_missing_categorical_uses_mode():
    ds = toy_dataset([["Medium", 1.0], ["Medium", 2.0], ["Low", 3.0]])
    state = fit_preprocessor(ds)
    fv = transform(StudentRecord(id="q", values=(None, 2.0)), state)
    assert fv.values[0] == state.encoders["level"]["Medium"]


def test_unseen_level_errors_and_fallback():
    ds = toy_dataset([["A", 1.0], ["B", 2.0], ["B", 3.0]])
    state = fit_preprocessor(ds)
    rec = StudentRecord(id="q", values=("C", 1.0))
    with pytest.raises(DataError, match=r"level.*'C'"):
        transform(rec, state)
    fv = transform(rec, state, unseen_to_mode=True)
    assert fv.values[0] == state.encoders["level"]["B"]


def test_constant_column_scales_to_zero():
    ds = toy_dataset([["A", 5.0], ["A", 5.0]])
    state = fit_preprocessor(ds)
    fv = transform(StudentRecord(id="q", values=("A", 123.0)), state)
    assert fv.values[1] == 0.0


def test_empty_dataset_rejected():
    with pytest.raises(DataError):
        fit_preprocessor(Dataset(schema=TOY, rows=()))


def test_all_missing_column_rejected():
    ds = toy_dataset([[None, 1.0], [None, 2.0]])
    with pytest.raises(DataError, match="level"):
        fit_preprocessor(ds)


def test_encoding_roundtrip_bijection(synth_small):
    state = fit_preprocessor(synth_small)
    for col, codes in state.encoders.items():
        values = sorted(codes.values())
        assert values == list(range(len(codes)))
        for level, code in codes.items():
            assert state.decode(col, code) == level


def test_transform_dataset_shape_and_means(synth_small):
    state = fit_preprocessor(synth_small)
    X, y = transform_dataset(synth_small, state)
    assert X.shape == (synth_small.n, synth_small.schema.n_features)
    assert y.shape == (synth_small.n,)
    assert np.isfinite(X).all()
    for j, col in enumerate(synth_small.schema.columns):
        if col.kind == NUMERIC:
            mean, std = state.scaler[col.name]
            if std > 0:
                assert abs(X[:, j].mean()) < 1e-9
                assert abs(X[:, j].std() - 1.0) < 1e-9


def test_targets_not_scaled(synth_small):
    state = fit_preprocessor(synth_small)
    _, y = transform_dataset(synth_small, state)
    assert y[0] == synth_small.rows[0].target


def test_fit_transform_separation(synth_small):
    # corrupting "test" rows must not change the fitted state
    state = fit_preprocessor(synth_small)
    doc_before = state_to_json(state)
    weird = StudentRecord(id="w", values=tuple(
        None if c.kind == CATEGORICAL else 1e6 for c in synth_small.schema.columns))
    transform(weird, state)
    assert state_to_json(state) == doc_before


def test_transform_error_carries_row_index():
    ds = toy_dataset([["A", 1.0], ["B", 2.0]])
    state = fit_preprocessor(ds)
    bad = toy_dataset([["A", 1.0], ["Z", 2.0]])
    with pytest.raises(DataError, match="row 1"):
        transform_dataset(bad, state)


def test_state_json_roundtrip(synth_small):
    state = fit_preprocessor(synth_small)
    again = state_from_json(state_to_json(state))
    assert again.encoders == state.encoders
    assert again.imputation == state.imputation
    assert again.scaler == state.scaler
    assert state_to_json(again) == state_to_json(state)


def test_state_json_version_check(synth_small):
    state = fit_preprocessor(synth_small)
    doc = state_to_json(state).replace('"version": 1', '"version": 0')
    with pytest.raises(DataError, match="version"):
        state_from_json(doc)
