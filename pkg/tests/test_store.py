import hashlib
import json
import os
from pathlib import Path

import numpy as np
import pytest

from scoreloop import DataError, IntegrityError, TrainConfig
from scoreloop.loop import make_batch, submit_feedback, train_initial
from scoreloop.store import DatasetStore
from scoreloop.schema import StudentRecord
from scoreloop.synthetic import generate_dataset


@pytest.fixture
def store(tmp_path):
    data = generate_dataset(120, seed=5)
    s = DatasetStore.create(tmp_path / "store", data)
    yield s
    s.close()


def feedback_record(data, i, score=80.0):
    row = data.rows[i]
    return StudentRecord(id=f"student-{i}", values=row.values, target=score)


def test_fresh_store_is_empty(store):
    assert store.list_versions() == []
    assert store.latest_version_id() is None
    assert store.watermark() == 0
    assert store.feedback_records() == []
    assert store.row_count() == 120


def test_create_twice_rejected(tmp_path, store):
    data = generate_dataset(10, seed=0)
    with pytest.raises(DataError, match="already exists"):
        DatasetStore.create(store.root, data)


def test_open_missing(tmp_path):
    with pytest.raises(DataError, match="no store"):
        DatasetStore.open(tmp_path / "nothing")


def test_append_and_reopen(store):
    data = store.original_dataset()
    recs = [feedback_record(data, i) for i in range(5)]
    ids = store.append_feedback(recs, submitted_at=123.0, note="tutoring")
    assert ids == [f"feedback-{i}" for i in range(1, 6)]
    store.close()

    again = DatasetStore.open(store.root)
    rows = again.feedback_records()
    assert len(rows) == 5
    assert rows[0][1]["note"] == "tutoring"
    assert again.row_count() == 125
    full = again.full_dataset()
    assert full.n == 125
    assert full.provenance[-1] == "feedback"
    assert full.provenance[0] == "original"


def test_append_validates_atomically(store):
    data = store.original_dataset()
    good = feedback_record(data, 0)
    bad = StudentRecord(id="bad", values=data.rows[0].values, target=150.0)
    with pytest.raises(DataError):
        store.append_feedback([good, bad], submitted_at=0.0, note="")
    assert store.feedback_records() == []  # no partial append


def test_feedback_line_corruption_detected(store):
    data = store.original_dataset()
    store.append_feedback([feedback_record(data, 0)], submitted_at=0.0, note="")
    path = store.root / "feedback.jsonl"
    text = path.read_text()
    path.write_text(text.replace('"target":80.0', '"target":99.0'))
    with pytest.raises(IntegrityError, match="line 1"):
        store.feedback_records()


def test_version_roundtrip(store):
    v = train_initial(store, TrainConfig(num_rounds=3), test_fraction=0.2)
    assert store.list_versions() == [1]
    assert store.watermark() == 120
    loaded = store.get_version(1)
    assert loaded.version_id == 1
    assert loaded.parent_version is None
    assert loaded.trained_on_count == 120
    assert loaded.metrics.to_json() == v.metrics.to_json()
    x = np.zeros(19)
    assert loaded.model.predict(x) == v.model.predict(x)


def test_version_corruption_detected(store):
    train_initial(store, TrainConfig(num_rounds=2))
    mpath = store.root / "versions" / "1" / "model.json"
    doc = mpath.read_text()
    mpath.write_text(doc.replace("base_score", "base_scorf", 1))
    with pytest.raises(IntegrityError, match="model.json"):
        store.get_version(1)


def test_missing_version(store):
    with pytest.raises(DataError, match="no such version"):
        store.get_version(7)


def test_interrupted_put_version_leaves_no_partial(store):
    train_initial(store, TrainConfig(num_rounds=2))
    # simulate a crash between temp write and rename: a stale temp dir
    tmp = store.root / "versions" / ".tmp-2"
    tmp.mkdir()
    (tmp / "model.json").write_text("{ partial garbage")
    again = DatasetStore.open(store.root)
    assert again.list_versions() == [1]  # temp dir invisible to readers
    again.get_version(1)  # old version intact
    again.close()


def test_append_only_feedback_log(store):
    data = store.original_dataset()
    store.append_feedback([feedback_record(data, 0)], submitted_at=0.0, note="a")
    before = (store.root / "feedback.jsonl").read_bytes()
    store.append_feedback([feedback_record(data, 1)], submitted_at=1.0, note="b")
    after = (store.root / "feedback.jsonl").read_bytes()
    assert after[: len(before)] == before  # historical lines never rewritten


def test_reopen_idempotence_random_ops(tmp_path):
    rng = np.random.default_rng(11)
    data = generate_dataset(60, seed=2)
    s = DatasetStore.create(tmp_path / "s", data)
    train_initial(s, TrainConfig(num_rounds=2))
    for k in range(8):
        recs = [feedback_record(data, int(i), score=float(rng.integers(50, 100)))
                for i in rng.integers(0, 60, size=rng.integers(1, 4))]
        s.append_feedback(recs, submitted_at=float(k), note=f"op{k}")

    def state_of(store):
        return (
            store.list_versions(),
            [(r.id, r.target) for r, _ in store.feedback_records()],
            store.row_count(),
            store.watermark(),
        )

    expect = state_of(s)
    s.close()
    for _ in range(3):
        s2 = DatasetStore.open(tmp_path / "s")
        assert state_of(s2) == expect
        s2.close()


def test_audit_log_written(store):
    data = store.original_dataset()
    batch = make_batch([feedback_record(data, 0)], note="x")
    submit_feedback(store, batch)
    lines = (store.root / "audit.jsonl").read_text().splitlines()
    entry = json.loads(lines[-1])
    assert entry["endpoint"] == "feedback"
    assert entry["accepted"] == 1
    assert "timestamp" in entry


def test_writer_lock_exclusive(store, tmp_path):
    data = store.original_dataset()
    store.append_feedback([feedback_record(data, 0)], submitted_at=0.0, note="")
    other = DatasetStore.open(store.root)
    with pytest.raises(DataError, match="lock"):
        other.append_feedback([feedback_record(data, 1)], submitted_at=0.0, note="")
