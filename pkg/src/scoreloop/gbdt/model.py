"""Gradient boosting driver: config, training loop, prediction, model I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError, ModelError
from .binning import fit_bins
from .efb import bundle_features, build_bundle_columns, singleton_bundles
from .goss import goss_sample
from .tree import RegressionTree, build_tree

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class GossConfig:
    top_rate: float = 0.2
    other_rate: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.top_rate < 1.0 and 0.0 < self.other_rate < 1.0
                and self.top_rate + self.other_rate <= 1.0):
            raise DataError(f"invalid GOSS rates a={self.top_rate}, b={self.other_rate}")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    num_rounds: int = 100
    max_leaves: int = 31
    lam: float = 0.0
    min_samples_leaf: int = 20
    max_bins: int = 255
    goss: GossConfig | None = None
    efb_enabled: bool = False
    efb_max_conflicts: int = 0
    seed: int = 42

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise DataError("learning_rate must be positive")
        if self.num_rounds < 1 or self.max_leaves < 1 or self.min_samples_leaf < 1:
            raise DataError("num_rounds, max_leaves, min_samples_leaf must be positive")
        if self.lam < 0:
            raise DataError("lam must be non-negative")
        if not (2 <= self.max_bins <= 255):
            raise DataError("max_bins must be in [2, 255]")

    def to_dict(self) -> dict:
        d = {
            "learning_rate": self.learning_rate,
            "num_rounds": self.num_rounds,
            "max_leaves": self.max_leaves,
            "lam": self.lam,
            "min_samples_leaf": self.min_samples_leaf,
            "max_bins": self.max_bins,
            "goss": None if self.goss is None else
                {"top_rate": self.goss.top_rate, "other_rate": self.goss.other_rate},
            "efb_enabled": self.efb_enabled,
            "efb_max_conflicts": self.efb_max_conflicts,
            "seed": self.seed,
        }
        return d

    @staticmethod
    def from_dict(d: dict) -> "TrainConfig":
        goss = d.get("goss")
        return TrainConfig(
            learning_rate=d["learning_rate"], num_rounds=d["num_rounds"],
            max_leaves=d["max_leaves"], lam=d["lam"],
            min_samples_leaf=d["min_samples_leaf"], max_bins=d["max_bins"],
            goss=None if goss is None else GossConfig(**goss),
            efb_enabled=d["efb_enabled"],
            efb_max_conflicts=d.get("efb_max_conflicts", 0),
            seed=d["seed"],
        )


@dataclass(frozen=True)
class GBDTModel:
    base_score: float
    trees: tuple[RegressionTree, ...]
    config: TrainConfig
    feature_names: tuple[str, ...]
    train_rmse_history: tuple[float, ...] = field(default=())

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def predict_batch(self, features: np.ndarray) -> np.ndarray:
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[1] != self.n_features:
            raise ModelError(
                f"expected shape (n, {self.n_features}), got {features.shape}")
        out = np.full(features.shape[0], self.base_score)
        for t in self.trees:
            out += self.config.learning_rate * t.predict_batch(features)
        return out

    def predict(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n_features,):
            raise ModelError(f"expected {self.n_features} features, got shape {x.shape}")
        return self.base_score + self.config.learning_rate * sum(
            t.predict(x) for t in self.trees)


def compute_gradients(targets: np.ndarray, predictions: np.ndarray) -> np.ndarray:
    """Negative gradient of half squared loss: the residual y - yhat."""
    targets = np.asarray(targets, dtype=np.float64)
    predictions = np.asarray(predictions, dtype=np.float64)
    if targets.shape != predictions.shape:
        raise DataError(f"length mismatch: {targets.shape} vs {predictions.shape}")
    return targets - predictions


def train(features: np.ndarray, targets: np.ndarray,
          config: TrainConfig = TrainConfig(),
          feature_names: list[str] | None = None) -> GBDTModel:
    features = np.asarray(features, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] < 2:
        raise DataError("need a 2-D matrix with at least 2 rows")
    if targets.shape != (features.shape[0],):
        raise DataError("targets must align with feature rows")
    if np.isnan(features).any():
        raise ModelError("NaN in features; preprocessing contract violated")
    if not np.isfinite(targets).all():
        raise DataError("targets must be finite")

    n, d = features.shape
    names = tuple(feature_names) if feature_names else tuple(f"f{j}" for j in range(d))
    if len(names) != d:
        raise DataError("feature_names length mismatch")

    mapper = fit_bins(features, config.max_bins)
    binned = mapper.transform(features)
    n_bins = [mapper.n_bins(f) for f in range(d)]
    if config.efb_enabled:
        bundles = bundle_features(binned, n_bins, config.efb_max_conflicts)
    else:
        bundles = singleton_bundles(n_bins)
    columns = build_bundle_columns(binned, bundles)

    base = float(targets.mean())
    pred = np.full(n, base)
    trees: list[RegressionTree] = []
    history: list[float] = []
    all_rows = np.arange(n)

    for t in range(config.num_rounds):
        grad = targets - pred
        if config.goss is not None:
            rows, weights = goss_sample(grad, config.goss.top_rate,
                                        config.goss.other_rate, config.seed + t)
            g = grad[rows]
        else:
            rows, weights, g = all_rows, np.ones(n), grad
        tree = build_tree(binned, columns, bundles, mapper, g, weights, rows,
                          max_leaves=config.max_leaves, lam=config.lam,
                          min_samples_leaf=config.min_samples_leaf)
        trees.append(tree)
        pred += config.learning_rate * tree.predict_batch(features)
        history.append(float(np.sqrt(np.mean((targets - pred) ** 2))))

    return GBDTModel(base_score=base, trees=tuple(trees), config=config,
                     feature_names=names, train_rmse_history=tuple(history))


def _tree_to_dict(t: RegressionTree) -> dict:
    return {
        "feature": t.feature.tolist(),
        "threshold": [None if np.isnan(v) else v for v in t.threshold.tolist()],
        "left": t.left.tolist(),
        "right": t.right.tolist(),
        "value": t.value.tolist(),
        "cover": t.cover.tolist(),
    }


def _tree_from_dict(d: dict) -> RegressionTree:
    return RegressionTree(
        feature=np.array(d["feature"], dtype=np.int32),
        threshold=np.array([np.nan if v is None else v for v in d["threshold"]],
                           dtype=np.float64),
        left=np.array(d["left"], dtype=np.int32),
        right=np.array(d["right"], dtype=np.int32),
        value=np.array(d["value"], dtype=np.float64),
        cover=np.array(d["cover"], dtype=np.int64),
    )


def serialize_model(model: GBDTModel) -> str:
    """JSON document; floats use repr round-tripping, so predictions survive
    serialization bit-exactly."""
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "base_score": model.base_score,
        "config": model.config.to_dict(),
        "feature_names": list(model.feature_names),
        "train_rmse_history": list(model.train_rmse_history),
        "trees": [{"nodes": _tree_to_dict(t)} for t in model.trees],
    }
    return json.dumps(doc, sort_keys=True)


def deserialize_model(text: str) -> GBDTModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(f"malformed model document: {e}") from None
    if not isinstance(doc, dict) or "version" not in doc:
        raise ModelError("malformed model document: missing version")
    if doc["version"] != MODEL_FORMAT_VERSION:
        raise ModelError(f"unsupported model document version {doc['version']!r}")
    try:
        return GBDTModel(
            base_score=float(doc["base_score"]),
            trees=tuple(_tree_from_dict(t["nodes"]) for t in doc["trees"]),
            config=TrainConfig.from_dict(doc["config"]),
            feature_names=tuple(doc["feature_names"]),
            train_rmse_history=tuple(doc.get("train_rmse_history", ())),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"malformed model document: {e}") from None
