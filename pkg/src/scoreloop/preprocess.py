"""Fit/transform preprocessing: label encoding, imputation, standardization.

Categorical levels are mapped to integer codes in lexicographic order of
the level strings observed during fitting. Missing cells are imputed with
the training mode (categorical) or median (numeric). Numeric columns are
scaled to zero mean and unit variance using training statistics only; the
target is never scaled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .schema import CATEGORICAL, MISSING, Dataset, FeatureSchema, StudentRecord

STATE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class FeatureVector:
    record_id: str
    values: np.ndarray  # dense float64, no missing entries


@dataclass(frozen=True)
class PreprocessorState:
    """Everything fitted on the training set, frozen afterwards.

    encoders:   categorical column name -> {level: code}, codes 0..k-1
    imputation: column name -> mode (categorical level) or median (float)
    scaler:     numeric column name -> (mean, std); std is the population
                formula. A constant column keeps std == 0.0 and scales to 0.
    """

    schema: FeatureSchema
    encoders: dict[str, dict[str, int]]
    imputation: dict[str, object]
    scaler: dict[str, tuple[float, float]]

    def decode(self, column: str, code: int) -> str:
        for level, c in self.encoders[column].items():
            if c == code:
                return level
        raise KeyError(code)


def fit_preprocessor(train: Dataset) -> PreprocessorState:
    if train.n == 0:
        raise DataError("cannot fit preprocessor on an empty dataset")
    schema = train.schema
    encoders: dict[str, dict[str, int]] = {}
    imputation: dict[str, object] = {}
    scaler: dict[str, tuple[float, float]] = {}

    for j, col in enumerate(schema.columns):
        observed = [r.values[j] for r in train.rows if r.values[j] is not MISSING]
        if not observed:
            raise DataError(f"column {col.name!r} has no non-missing training values")
        if col.kind == CATEGORICAL:
            levels = sorted(set(observed))
            encoders[col.name] = {lvl: code for code, lvl in enumerate(levels)}
            # mode; ties broken by lexicographic order for determinism
            counts: dict[str, int] = {}
            for v in observed:
                counts[v] = counts.get(v, 0) + 1
            imputation[col.name] = min(counts, key=lambda k: (-counts[k], k))
        else:
            arr = np.array(observed, dtype=np.float64)
            median = float(np.median(arr))
            imputation[col.name] = median
            # mean/std over imputed values (missing replaced by the median)
            full = np.full(train.n, median)
            mask = [r.values[j] is not MISSING for r in train.rows]
            full[mask] = arr
            mean = float(full.mean())
            std = float(full.std())  # population convention
            scaler[col.name] = (mean, std)

    return PreprocessorState(schema=schema, encoders=encoders,
                             imputation=imputation, scaler=scaler)


def transform(record: StudentRecord, state: PreprocessorState, *,
              unseen_to_mode: bool = False) -> FeatureVector:
    """Encode, impute, and scale one record.

    An unseen categorical level is an error unless ``unseen_to_mode`` is
    set, in which case it falls back to the training mode's code.
    """
    schema = state.schema
    out = np.empty(schema.n_features, dtype=np.float64)
    for j, col in enumerate(schema.columns):
        v = record.values[j]
        if col.kind == CATEGORICAL:
            if v is MISSING:
                v = state.imputation[col.name]
            codes = state.encoders[col.name]
            if v not in codes:
                if unseen_to_mode:
                    v = state.imputation[col.name]
                else:
                    raise DataError(f"column {col.name!r}: unseen level {v!r}")
            out[j] = codes[v]
        else:
            if v is MISSING:
                v = state.imputation[col.name]
            mean, std = state.scaler[col.name]
            out[j] = (float(v) - mean) / std if std > 0.0 else 0.0
    return FeatureVector(record_id=record.id, values=out)


def transform_dataset(data: Dataset, state: PreprocessorState, *,
                      unseen_to_mode: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Batch transform preserving row order; targets returned unscaled."""
    d = state.schema.n_features
    features = np.empty((data.n, d), dtype=np.float64)
    targets = np.empty(data.n, dtype=np.float64)
    for i, row in enumerate(data.rows):
        try:
            features[i] = transform(row, state, unseen_to_mode=unseen_to_mode).values
        except DataError as e:
            raise DataError(f"row {i}: {e}") from None
        targets[i] = np.nan if row.target is None else row.target
    return features, targets


def state_to_json(state: PreprocessorState) -> str:
    doc = {
        "version": STATE_FORMAT_VERSION,
        "target": state.schema.target_name,
        "columns": [
            {"name": c.name, "kind": c.kind,
             "levels": list(c.levels) if c.levels else None}
            for c in state.schema.columns
        ],
        "encoders": state.encoders,
        "imputation": state.imputation,
        "scaler": {k: [m, s] for k, (m, s) in state.scaler.items()},
    }
    return json.dumps(doc, sort_keys=True)


def state_from_json(text: str) -> PreprocessorState:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DataError(f"malformed preprocessor document: {e}") from None
    if doc.get("version") != STATE_FORMAT_VERSION:
        raise DataError(f"unsupported preprocessor document version {doc.get('version')!r}")
    from .schema import Column

    schema = FeatureSchema(
        columns=tuple(
            Column(c["name"], c["kind"], tuple(c["levels"]) if c["levels"] else None)
            for c in doc["columns"]
        ),
        target_name=doc["target"],
    )
    return PreprocessorState(
        schema=schema,
        encoders={k: {lvl: int(code) for lvl, code in v.items()}
                  for k, v in doc["encoders"].items()},
        imputation=doc["imputation"],
        scaler={k: (float(v[0]), float(v[1])) for k, v in doc["scaler"].items()},
    )
