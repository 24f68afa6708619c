"""Durable file-backed store for datasets, feedback, and model versions.

Layout under the store root::

    original.csv      historical training data
    split.json        frozen train/test partition (seed, fraction, test ids)
    feedback.jsonl    append-only post-intervention records, one per line
    versions/<n>/     model.json, preprocessor.json, metrics.json, meta.json,
                      checksums.json
    audit.jsonl       mutation log
    LOCK              advisory writer lock

Version directories are written to a temp name and renamed into place, so
a crash mid-write leaves no partial version. Feedback lines are fsync'd
and carry a per-line checksum; version files are checksummed as a group.
"""

from __future__ import annotations

import fcntl
import hashlib
import json
import os
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError, IntegrityError
from .gbdt.model import GBDTModel, deserialize_model, serialize_model
from .metrics import MetricsReport
from .preprocess import PreprocessorState, state_from_json, state_to_json
from .schema import Dataset, FeatureSchema, StudentRecord, load_csv, write_csv


@dataclass(frozen=True)
class ModelVersion:
    version_id: int
    model: GBDTModel
    preprocessor: PreprocessorState
    trained_on_count: int
    metrics: MetricsReport
    parent_version: int | None = None


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


class DatasetStore:
    """Single-writer store; mutations take an advisory flock on LOCK."""

    def __init__(self, root, schema: FeatureSchema):
        self.root = Path(root)
        self.schema = schema
        self._lock_fd: int | None = None

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def create(cls, root, original: Dataset) -> "DatasetStore":
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        if (root / "original.csv").exists():
            raise DataError(f"store already exists at {root}")
        write_csv(original, root / "original.csv")
        (root / "versions").mkdir(exist_ok=True)
        (root / "LOCK").touch()
        return cls(root, original.schema)

    @classmethod
    def open(cls, root, schema: FeatureSchema | None = None) -> "DatasetStore":
        from .schema import default_schema

        root = Path(root)
        if not (root / "original.csv").exists():
            raise DataError(f"no store at {root} (original.csv missing)")
        store = cls(root, schema or default_schema())
        store._verify_feedback_log()
        return store

    def _acquire_writer(self):
        if self._lock_fd is None:
            self._lock_fd = os.open(self.root / "LOCK", os.O_RDWR | os.O_CREAT)
            try:
                fcntl.flock(self._lock_fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
            except OSError:
                os.close(self._lock_fd)
                self._lock_fd = None
                raise DataError(f"another writer holds the lock on {self.root}") from None

    def close(self):
        if self._lock_fd is not None:
            fcntl.flock(self._lock_fd, fcntl.LOCK_UN)
            os.close(self._lock_fd)
            self._lock_fd = None

    # -- datasets ----------------------------------------------------------

    def original_dataset(self) -> Dataset:
        return load_csv(self.root / "original.csv", self.schema)

    def feedback_records(self) -> list[tuple[StudentRecord, dict]]:
        """All feedback rows with their line metadata, in append order."""
        path = self.root / "feedback.jsonl"
        if not path.exists():
            return []
        out = []
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            entry = json.loads(line)
            payload = {k: v for k, v in entry.items() if k != "sha256"}
            if _sha256(_canonical(payload).encode()) != entry.get("sha256"):
                raise IntegrityError(
                    f"feedback.jsonl line {lineno} failed its checksum",
                    path=str(path))
            values = tuple(entry["values"][c.name] for c in self.schema.columns)
            rec = StudentRecord(id=entry["id"], values=values, target=entry["target"])
            out.append((rec, entry))
        return out

    def _verify_feedback_log(self):
        self.feedback_records()

    def full_dataset(self) -> Dataset:
        orig = self.original_dataset()
        fb = [rec for rec, _ in self.feedback_records()]
        return Dataset(
            schema=self.schema,
            rows=orig.rows + tuple(fb),
            provenance=orig.provenance + tuple("feedback" for _ in fb),
        )

    def row_count(self) -> int:
        return self.original_dataset().n + len(self.feedback_records())

    def append_feedback(self, records: list[StudentRecord], *,
                        submitted_at: float, note: str) -> list[str]:
        """Validated, atomic, fsync'd append; returns the new row ids."""
        if not records:
            raise DataError("feedback batch must contain at least one record")
        for r in records:
            if len(r.values) != self.schema.n_features:
                raise DataError(f"record {r.id!r} does not conform to the schema")
            if r.target is None or not (0.0 <= r.target <= 100.0):
                raise DataError(f"record {r.id!r} needs an observed score in [0, 100]")
        self._acquire_writer()
        start = len(self.feedback_records())
        lines = []
        ids = []
        for i, r in enumerate(records):
            rid = f"feedback-{start + i + 1}"
            payload = {
                "id": rid,
                "values": {c.name: r.values[j] for j, c in enumerate(self.schema.columns)},
                "target": r.target,
                "submitted_at": submitted_at,
                "note": note,
            }
            payload["sha256"] = _sha256(_canonical(
                {k: v for k, v in payload.items()}).encode())
            lines.append(_canonical(payload))
            ids.append(rid)
        with open(self.root / "feedback.jsonl", "a", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        return ids

    # -- frozen split ------------------------------------------------------

    def save_split(self, seed: int, fraction: float, test_ids: list[str]):
        doc = {"seed": seed, "fraction": fraction, "test_ids": test_ids}
        tmp = self.root / "split.json.tmp"
        tmp.write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")
        os.replace(tmp, self.root / "split.json")

    def load_split(self) -> dict | None:
        path = self.root / "split.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    # -- model versions ------------------------------------------------------

    def list_versions(self) -> list[int]:
        vdir = self.root / "versions"
        if not vdir.exists():
            return []
        return sorted(int(p.name) for p in vdir.iterdir()
                      if p.is_dir() and p.name.isdigit())

    def latest_version_id(self) -> int | None:
        ids = self.list_versions()
        return ids[-1] if ids else None

    def watermark(self) -> int:
        """Row count the latest version was trained on (0 if untrained)."""
        vid = self.latest_version_id()
        if vid is None:
            return 0
        meta = json.loads((self.root / "versions" / str(vid) / "meta.json")
                          .read_text(encoding="utf-8"))
        return meta["trained_on_count"]

    def put_version(self, version: ModelVersion) -> None:
        self._acquire_writer()
        vdir = self.root / "versions" / str(version.version_id)
        if vdir.exists():
            raise DataError(f"version {version.version_id} already exists")
        tmp = self.root / "versions" / f".tmp-{version.version_id}"
        if tmp.exists():
            for p in tmp.iterdir():
                p.unlink()
            tmp.rmdir()
        tmp.mkdir(parents=True)
        files = {
            "model.json": serialize_model(version.model),
            "preprocessor.json": state_to_json(version.preprocessor),
            "metrics.json": version.metrics.to_json(),
            "meta.json": json.dumps({
                "version_id": version.version_id,
                "trained_on_count": version.trained_on_count,
                "parent_version": version.parent_version,
            }, sort_keys=True),
        }
        checksums = {}
        for name, text in files.items():
            data = text.encode("utf-8")
            checksums[name] = _sha256(data)
            with open(tmp / name, "wb") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
        (tmp / "checksums.json").write_text(json.dumps(checksums, sort_keys=True),
                                            encoding="utf-8")
        os.replace(tmp, vdir)
        dirfd = os.open(self.root / "versions", os.O_RDONLY)
        try:
            os.fsync(dirfd)
        finally:
            os.close(dirfd)

    def get_version(self, version_id: int) -> ModelVersion:
        vdir = self.root / "versions" / str(version_id)
        if not vdir.is_dir():
            raise DataError(f"no such version: {version_id}")
        checksums = json.loads((vdir / "checksums.json").read_text(encoding="utf-8"))
        texts = {}
        for name, expected in checksums.items():
            data = (vdir / name).read_bytes()
            if _sha256(data) != expected:
                raise IntegrityError(f"{vdir / name} failed its checksum",
                                     path=str(vdir / name))
            texts[name] = data.decode("utf-8")
        meta = json.loads(texts["meta.json"])
        return ModelVersion(
            version_id=meta["version_id"],
            model=deserialize_model(texts["model.json"]),
            preprocessor=state_from_json(texts["preprocessor.json"]),
            trained_on_count=meta["trained_on_count"],
            metrics=MetricsReport.from_dict(json.loads(texts["metrics.json"])),
            parent_version=meta["parent_version"],
        )

    # -- audit ---------------------------------------------------------------

    def append_audit(self, endpoint: str, **fields) -> None:
        entry = {"timestamp": time.time(), "endpoint": endpoint, **fields}
        with open(self.root / "audit.jsonl", "a", encoding="utf-8") as fh:
            fh.write(_canonical(entry) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
