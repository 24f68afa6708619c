"""Regression metrics and evaluation snapshots.

Variances use the population convention (divide by N), matching the
scaler. MAPE raises on a zero true value rather than epsilon-guarding:
a silent distortion is worse than a loud error, and callers may filter.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from .errors import DataError


def _check(y, yhat) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    if y.shape != yhat.shape:
        raise DataError(f"length mismatch: {y.shape} vs {yhat.shape}")
    if y.size == 0:
        raise DataError("empty vectors")
    return y, yhat


def rmse(y, yhat) -> float:
    y, yhat = _check(y, yhat)
    return float(np.sqrt(np.mean((y - yhat) ** 2)))


def mae(y, yhat) -> float:
    y, yhat = _check(y, yhat)
    return float(np.mean(np.abs(y - yhat)))


def r2(y, yhat) -> float:
    y, yhat = _check(y, yhat)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise DataError("r2 undefined: true values have zero variance")
    ss_res = float(np.sum((y - yhat) ** 2))
    return 1.0 - ss_res / ss_tot


def mape(y, yhat) -> float:
    """Mean absolute percentage error, in percent."""
    y, yhat = _check(y, yhat)
    if np.any(y == 0.0):
        raise DataError("mape undefined for zero true values")
    return float(100.0 * np.mean(np.abs((y - yhat) / y)))


def explained_variance(y, yhat) -> float:
    y, yhat = _check(y, yhat)
    var_y = float(np.var(y))
    if var_y == 0.0:
        raise DataError("explained variance undefined: true values have zero variance")
    return 1.0 - float(np.var(y - yhat)) / var_y


@dataclass(frozen=True)
class MetricsReport:
    rmse: float
    mae: float
    r2: float
    mape_percent: float
    explained_variance: float
    n: int
    phase_label: str
    timestamp: float

    def to_dict(self) -> dict:
        return {
            "rmse": self.rmse,
            "mae": self.mae,
            "r2": self.r2,
            "mape_percent": self.mape_percent,
            "explained_variance": self.explained_variance,
            "n": self.n,
            "phase_label": self.phase_label,
            "timestamp": self.timestamp,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_dict(d: dict) -> "MetricsReport":
        return MetricsReport(
            rmse=d["rmse"], mae=d["mae"], r2=d["r2"],
            mape_percent=d["mape_percent"],
            explained_variance=d["explained_variance"],
            n=d["n"], phase_label=d["phase_label"], timestamp=d["timestamp"],
        )


def compute_report(y, yhat, *, label: str, timestamp: float | None = None) -> MetricsReport:
    y, yhat = _check(y, yhat)
    return MetricsReport(
        rmse=rmse(y, yhat),
        mae=mae(y, yhat),
        r2=r2(y, yhat),
        mape_percent=mape(y, yhat),
        explained_variance=explained_variance(y, yhat),
        n=int(y.size),
        phase_label=label,
        timestamp=time.time() if timestamp is None else timestamp,
    )


def evaluate_model(model, test, state, label: str) -> MetricsReport:
    """Transform a test Dataset, predict, and compute all five metrics."""
    from .preprocess import transform_dataset

    if test.n == 0:
        raise DataError("cannot evaluate on an empty dataset")
    features, targets = transform_dataset(test, state)
    preds = model.predict_batch(features)
    return compute_report(targets, preds, label=label)
