"""The closed loop: feedback intake, full retraining, version comparison.

Retraining is a full refit on the union of the historical training rows
and every accepted feedback row; the version chain is what makes the
system incremental. The preprocessor is refit on the union too (feedback
may introduce new levels or shift medians), and the (model, preprocessor)
pair is always versioned together. The evaluation test set is frozen when
the first version is trained so the before/after comparison stays
apples-to-apples.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .errors import DataError
from .gbdt.model import TrainConfig, train
from .metrics import MetricsReport, evaluate_model
from .preprocess import fit_preprocessor, transform, transform_dataset
from .schema import Dataset, StudentRecord, split
from .store import DatasetStore, ModelVersion

FLAT_EPSILON = 0.005  # |diff| below this renders as a flat trend


@dataclass(frozen=True)
class FeedbackBatch:
    records: tuple[StudentRecord, ...]
    submitted_at: float
    note: str = ""

    def __post_init__(self):
        if len(self.records) < 1:
            raise DataError("feedback batch must contain at least one record")
        for r in self.records:
            if r.target is None or not (0.0 <= r.target <= 100.0):
                raise DataError(
                    f"record {r.id!r}: observed score must be present and in [0, 100]")


@dataclass(frozen=True)
class ComparisonRow:
    id: str
    initial_score: float
    post_retrain_score: float
    diff: float
    trend: str  # "up" | "down" | "flat"

    def to_dict(self) -> dict:
        return {"id": self.id, "initial_score": self.initial_score,
                "post_retrain_score": self.post_retrain_score,
                "diff": self.diff, "trend": self.trend}


@dataclass(frozen=True)
class RetrainReport:
    before: MetricsReport
    after: MetricsReport
    rows: tuple[ComparisonRow, ...]

    def to_dict(self) -> dict:
        return {"before": self.before.to_dict(), "after": self.after.to_dict(),
                "rows": [r.to_dict() for r in self.rows]}


def submit_feedback(store: DatasetStore, batch: FeedbackBatch) -> list[str]:
    """Append the batch atomically; returns assigned row ids."""
    ids = store.append_feedback(list(batch.records),
                                submitted_at=batch.submitted_at, note=batch.note)
    store.append_audit("feedback", accepted=len(ids), note=batch.note)
    return ids


def _frozen_test_set(store: DatasetStore, original: Dataset) -> Dataset:
    info = store.load_split()
    if info is None:
        raise DataError("store has no frozen split; train an initial version first")
    wanted = set(info["test_ids"])
    rows = tuple(r for r in original.rows if r.id in wanted)
    if len(rows) != len(wanted):
        raise DataError("frozen test ids no longer resolve against original.csv")
    return Dataset(schema=original.schema, rows=rows)


def _train_version(store: DatasetStore, config: TrainConfig, *,
                   version_id: int, parent: int | None, label: str) -> ModelVersion:
    original = store.original_dataset()
    test = _frozen_test_set(store, original)
    test_ids = {r.id for r in test.rows}
    fb = [rec for rec, _ in store.feedback_records()]
    train_rows = tuple(r for r in original.rows if r.id not in test_ids) + tuple(fb)
    train_ds = Dataset(
        schema=original.schema,
        rows=train_rows,
        provenance=tuple("original" if not r.id.startswith("feedback") else "feedback"
                         for r in train_rows),
    )
    state = fit_preprocessor(train_ds)
    features, targets = transform_dataset(train_ds, state)
    model = train(features, targets, config,
                  feature_names=original.schema.input_names)
    metrics = evaluate_model(model, test, state, label)
    version = ModelVersion(
        version_id=version_id,
        model=model,
        preprocessor=state,
        trained_on_count=original.n + len(fb),
        metrics=metrics,
        parent_version=parent,
    )
    store.put_version(version)
    return version


def train_initial(store: DatasetStore, config: TrainConfig = TrainConfig(), *,
                  test_fraction: float = 0.2, split_seed: int = 42) -> ModelVersion:
    """Split, freeze the test set, and train version 1."""
    if store.latest_version_id() is not None:
        raise DataError("store already has a trained version; use retrain")
    original = store.original_dataset()
    _, test = split(original, test_fraction, split_seed)
    store.save_split(split_seed, test_fraction, [r.id for r in test.rows])
    version = _train_version(store, config, version_id=1, parent=None, label="Initial")
    store.append_audit("train", version_id=1)
    return version


def retrain(store: DatasetStore, config: TrainConfig = TrainConfig(), *,
            force: bool = False) -> ModelVersion:
    """Full refit on the updated dataset; deploys a new version atomically.

    Requires at least one feedback row since the last version unless
    ``force`` is set. Any training failure propagates before the store is
    touched, leaving the previous version deployed.
    """
    parent = store.latest_version_id()
    if parent is None:
        raise DataError("no initial version; run train_initial first")
    current = store.row_count()
    if not force and current <= store.watermark():
        raise DataError("no new feedback since the last version (use force to retrain)")
    n_retrains = parent  # version ids are 1-based and contiguous
    version = _train_version(store, config, version_id=parent + 1, parent=parent,
                             label=f"Retrained ({n_retrains})" if n_retrains > 1 else "Retrained")
    store.append_audit("retrain", version_id=version.version_id, parent=parent)
    return version


def compare_predictions(old: ModelVersion, new: ModelVersion,
                        records: list[StudentRecord]) -> list[ComparisonRow]:
    rows = []
    for r in records:
        before = old.model.predict(transform(r, old.preprocessor).values)
        after = new.model.predict(transform(r, new.preprocessor).values)
        diff = after - before
        trend = "flat" if abs(diff) < FLAT_EPSILON else ("up" if diff > 0 else "down")
        rows.append(ComparisonRow(id=r.id, initial_score=before,
                                  post_retrain_score=after, diff=diff, trend=trend))
    return rows


def build_retrain_report(store: DatasetStore, old: ModelVersion,
                         new: ModelVersion) -> RetrainReport:
    """Before/after metrics plus per-feedback-student prediction diffs."""
    fb = [rec for rec, _ in store.feedback_records()]
    return RetrainReport(
        before=old.metrics,
        after=new.metrics,
        rows=tuple(compare_predictions(old, new, fb)),
    )


def evaluation_history(store: DatasetStore) -> list[MetricsReport]:
    """Frozen-test metrics of every version, in version order."""
    return [store.get_version(v).metrics for v in store.list_versions()]


def make_batch(records: list[StudentRecord], note: str = "") -> FeedbackBatch:
    return FeedbackBatch(records=tuple(records), submitted_at=time.time(), note=note)
