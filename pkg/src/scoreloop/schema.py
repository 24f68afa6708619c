"""Student-data schema, CSV loading, and train/test splitting.

The default schema is the 19-feature student-performance layout with
Exam_Score as the target. A custom schema can be read from a plain
key-value text file (see ``parse_schema_file``).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

CATEGORICAL = "categorical"
NUMERIC = "numeric"

MISSING = None  # marker for an empty cell


@dataclass(frozen=True)
class Column:
    name: str
    kind: str  # CATEGORICAL or NUMERIC
    levels: tuple[str, ...] | None = None  # known levels, if declared

    def __post_init__(self):
        if self.kind not in (CATEGORICAL, NUMERIC):
            raise DataError(f"unknown column kind {self.kind!r} for {self.name!r}")


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered input columns plus a single numeric target column."""

    columns: tuple[Column, ...]
    target_name: str = "Exam_Score"

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("duplicate column names in schema")
        if self.target_name in names:
            raise DataError("target column must not appear among input columns")

    @property
    def input_names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def n_features(self) -> int:
        return len(self.columns)

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)


def default_schema() -> FeatureSchema:
    """The 19-input student-performance schema with Exam_Score target."""
    lmh = ("High", "Low", "Medium")
    yn = ("No", "Yes")
    cols = (
        Column("Hours_Studied", NUMERIC),
        Column("Attendance", NUMERIC),
        Column("Parental_Involvement", CATEGORICAL, lmh),
        Column("Access_to_Resources", CATEGORICAL, lmh),
        Column("Extracurricular_Activities", CATEGORICAL, yn),
        Column("Sleep_Hours", NUMERIC),
        Column("Previous_Scores", NUMERIC),
        Column("Motivation_Level", CATEGORICAL, lmh),
        Column("Internet_Access", CATEGORICAL, yn),
        Column("Tutoring_Sessions", NUMERIC),
        Column("Family_Income", CATEGORICAL, lmh),
        Column("Teacher_Quality", CATEGORICAL, lmh),
        Column("School_Type", CATEGORICAL, ("Private", "Public")),
        Column("Peer_Influence", CATEGORICAL, ("Negative", "Neutral", "Positive")),
        Column("Physical_Activity", NUMERIC),
        Column("Learning_Disabilities", CATEGORICAL, yn),
        Column("Parental_Education_Level", CATEGORICAL, ("College", "High School", "Postgraduate")),
        Column("Distance_from_Home", CATEGORICAL, ("Far", "Moderate", "Near")),
        Column("Gender", CATEGORICAL, ("Female", "Male")),
    )
    return FeatureSchema(columns=cols, target_name="Exam_Score")


@dataclass(frozen=True)
class StudentRecord:
    """One row: input cells in schema order, optional target, opaque id."""

    id: str
    values: tuple  # str | float | None, len == schema.n_features
    target: float | None = None


@dataclass(frozen=True)
class Dataset:
    schema: FeatureSchema
    rows: tuple[StudentRecord, ...]
    provenance: tuple[str, ...] = field(default=())  # "original" | "feedback" per row

    def __post_init__(self):
        if not self.provenance:
            object.__setattr__(self, "provenance", tuple("original" for _ in self.rows))
        if len(self.provenance) != len(self.rows):
            raise DataError("provenance length does not match row count")
        for r in self.rows:
            if len(r.values) != self.schema.n_features:
                raise DataError(f"record {r.id!r} has {len(r.values)} cells, schema expects {self.schema.n_features}")

    @property
    def n(self) -> int:
        return len(self.rows)

    def targets(self) -> np.ndarray:
        return np.array([r.target for r in self.rows], dtype=np.float64)


def _parse_cell(raw: str, col: Column, row_idx: int):
    raw = raw.strip()
    if raw == "":
        return MISSING
    if col.kind == NUMERIC:
        try:
            return float(raw)
        except ValueError:
            raise DataError(
                f"row {row_idx}, column {col.name!r}: non-numeric value {raw!r}"
            ) from None
    return raw


def load_csv(path, schema: FeatureSchema | None = None, *, with_target: bool = True,
             provenance: str = "original") -> Dataset:
    """Load a comma-separated UTF-8 file into a Dataset.

    The header must match the schema's input names in order, with the
    target column last when ``with_target`` is true. Empty cells become
    missing markers. Rows with a missing target are rejected when the
    target column is present.
    """
    schema = schema or default_schema()
    expected = schema.input_names + ([schema.target_name] if with_target else [])
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"file not found: {path}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, header required") from None
        header = [h.strip() for h in header]
        if header != expected:
            for i, (got, want) in enumerate(zip(header, expected)):
                if got != want:
                    raise DataError(f"{path}: header mismatch at column {i}: got {got!r}, expected {want!r}")
            raise DataError(f"{path}: header has {len(header)} columns, expected {len(expected)}")

        rows = []
        for row_idx, raw in enumerate(reader, start=1):
            if len(raw) != len(expected):
                raise DataError(f"{path}: row {row_idx} has {len(raw)} cells, expected {len(expected)}")
            cells = tuple(
                _parse_cell(raw[j], schema.columns[j], row_idx)
                for j in range(schema.n_features)
            )
            target = None
            if with_target:
                tgt_raw = raw[-1].strip()
                if tgt_raw == "":
                    raise DataError(f"{path}: row {row_idx} has a missing {schema.target_name}")
                try:
                    target = float(tgt_raw)
                except ValueError:
                    raise DataError(
                        f"row {row_idx}, column {schema.target_name!r}: non-numeric value {tgt_raw!r}"
                    ) from None
                if not (0.0 <= target <= 100.0):
                    raise DataError(f"{path}: row {row_idx} target {target} outside [0, 100]")
            rows.append(StudentRecord(id=f"{provenance}-{row_idx}", values=cells, target=target))
    return Dataset(schema=schema, rows=tuple(rows),
                   provenance=tuple(provenance for _ in rows))


def split(data: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic shuffled split; |test| = round(N * test_fraction)."""
    if not (0.0 < test_fraction < 1.0):
        raise DataError(f"test_fraction must be in (0, 1), got {test_fraction}")
    if data.n < 2:
        raise DataError("need at least 2 rows to split")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(data.n)
    n_test = int(round(data.n * test_fraction))
    test_idx = sorted(perm[:n_test].tolist())
    train_idx = sorted(perm[n_test:].tolist())

    def take(idx):
        return Dataset(
            schema=data.schema,
            rows=tuple(data.rows[i] for i in idx),
            provenance=tuple(data.provenance[i] for i in idx),
        )

    return take(train_idx), take(test_idx)


def record_from_mapping(schema: FeatureSchema, mapping: dict, *,
                        record_id: str, require_target: bool = False) -> StudentRecord:
    """Build a StudentRecord from a {column: value} mapping (e.g. JSON).

    Absent or null cells become missing markers. Raises DataError with
    per-field messages for unknown fields and bad values.
    """
    problems = []
    known = set(schema.input_names) | {schema.target_name}
    for key in mapping:
        if key not in known and key != "id":
            problems.append(f"{key}: unknown field")
    cells = []
    for col in schema.columns:
        v = mapping.get(col.name)
        if v is None or v == "":
            cells.append(MISSING)
        elif col.kind == NUMERIC:
            try:
                cells.append(float(v))
            except (TypeError, ValueError):
                problems.append(f"{col.name}: expected a number, got {v!r}")
                cells.append(MISSING)
        else:
            if not isinstance(v, str):
                problems.append(f"{col.name}: expected a string level, got {v!r}")
                cells.append(MISSING)
            else:
                cells.append(v)
    target = mapping.get(schema.target_name)
    if target is not None:
        try:
            target = float(target)
        except (TypeError, ValueError):
            problems.append(f"{schema.target_name}: expected a number, got {target!r}")
            target = None
        else:
            if not (0.0 <= target <= 100.0):
                problems.append(f"{schema.target_name}: {target} outside [0, 100]")
    elif require_target:
        problems.append(f"{schema.target_name}: required")
    if problems:
        raise DataError("; ".join(problems))
    return StudentRecord(id=str(mapping.get("id", record_id)), values=tuple(cells),
                         target=target)


def write_csv(data: Dataset, path) -> None:
    """Inverse of load_csv; missing cells become empty fields."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(data.schema.input_names + [data.schema.target_name])
        for r in data.rows:
            cells = ["" if v is None else (format(v, "g") if isinstance(v, float) else v)
                     for v in r.values]
            writer.writerow(cells + [format(r.target, "g")])


def parse_schema_file(path) -> FeatureSchema:
    """Read a schema from a key-value text file.

    Format, one entry per line ('#' starts a comment)::

        target = Exam_Score
        Hours_Studied = numeric
        Parental_Involvement = categorical: Low, Medium, High

    Input columns appear in file order; levels after 'categorical:' are
    optional.
    """
    target = "Exam_Score"
    cols: list[Column] = []
    try:
        text = open(path, encoding="utf-8").read()
    except FileNotFoundError:
        raise DataError(f"schema file not found: {path}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected 'name = kind'")
        name, rhs = (s.strip() for s in line.split("=", 1))
        if name == "target":
            target = rhs
            continue
        if rhs == NUMERIC:
            cols.append(Column(name, NUMERIC))
        elif rhs == CATEGORICAL:
            cols.append(Column(name, CATEGORICAL))
        elif rhs.startswith(CATEGORICAL + ":"):
            levels = tuple(sorted(s.strip() for s in rhs.split(":", 1)[1].split(",") if s.strip()))
            cols.append(Column(name, CATEGORICAL, levels or None))
        else:
            raise DataError(f"{path}:{lineno}: unknown kind {rhs!r}")
    if not cols:
        raise DataError(f"{path}: no columns declared")
    return FeatureSchema(columns=tuple(cols), target_name=target)
