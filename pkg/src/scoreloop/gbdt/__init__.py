from .binning import BinMapper, fit_bins
from .efb import FeatureBundle, bundle_features, build_bundle_columns, singleton_bundles
from .goss import goss_sample
from .model import (
    GBDTModel,
    GossConfig,
    TrainConfig,
    compute_gradients,
    deserialize_model,
    serialize_model,
    train,
)
from .tree import RegressionTree, build_tree

__all__ = [
    "BinMapper", "fit_bins",
    "FeatureBundle", "bundle_features", "build_bundle_columns", "singleton_bundles",
    "goss_sample",
    "GBDTModel", "GossConfig", "TrainConfig",
    "compute_gradients", "deserialize_model", "serialize_model", "train",
    "RegressionTree", "build_tree",
]
