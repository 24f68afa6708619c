"""Closed-loop student exam-score prediction.

A from-scratch histogram GBDT regressor with GOSS sampling and exclusive
feature bundling, exact tree Shapley explanations, regression metrics,
and a feedback store that folds post-intervention outcomes back into the
training set and retrains.
"""

from .errors import DataError, IntegrityError, ModelError, RetrainInProgressError, ScoreloopError
from .explain import GlobalImportance, ShapExplanation, explain, global_importance
from .gbdt import (
    GBDTModel,
    GossConfig,
    TrainConfig,
    compute_gradients,
    deserialize_model,
    serialize_model,
    train,
)
from .metrics import MetricsReport, compute_report, evaluate_model, explained_variance, mae, mape, r2, rmse
from .preprocess import (
    FeatureVector,
    PreprocessorState,
    fit_preprocessor,
    state_from_json,
    state_to_json,
    transform,
    transform_dataset,
)
from .schema import Column, Dataset, FeatureSchema, StudentRecord, default_schema, load_csv, parse_schema_file, split

__version__ = "0.1.0"
