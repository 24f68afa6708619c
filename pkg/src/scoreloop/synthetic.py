"""Synthetic student-performance data matching the default schema.

The public exam-score dataset this project targets cannot be
redistributed, so tests and demos generate a stand-in with the same
columns and a similar signal structure: exam score driven mostly by
attendance, hours studied, previous scores, and tutoring, plus smaller
categorical effects and irreducible noise. If you have the real CSV,
point the tools at it instead.
"""

from __future__ import annotations

import numpy as np

from .schema import Dataset, StudentRecord, default_schema

_LMH = np.array(["Low", "Medium", "High"])
_YN = np.array(["No", "Yes"])


def generate_dataset(n: int = 6607, seed: int = 7, *,
                     missing_rate: float = 0.02) -> Dataset:
    rng = np.random.default_rng(seed)
    schema = default_schema()

    hours = np.clip(np.rint(rng.normal(20, 6, n)), 1, 44)
    attendance = np.rint(rng.uniform(60, 100, n))
    sleep = np.rint(rng.uniform(4, 10, n))
    previous = np.rint(rng.uniform(50, 100, n))
    tutoring = np.clip(rng.poisson(1.5, n), 0, 8)
    activity = np.rint(rng.uniform(0, 6, n))

    involv = rng.choice(_LMH, n, p=[0.2, 0.5, 0.3])
    resources = rng.choice(_LMH, n, p=[0.2, 0.5, 0.3])
    extra = rng.choice(_YN, n, p=[0.4, 0.6])
    motivation = rng.choice(_LMH, n, p=[0.3, 0.5, 0.2])
    internet = rng.choice(_YN, n, p=[0.08, 0.92])
    income = rng.choice(_LMH, n, p=[0.4, 0.4, 0.2])
    teacher = rng.choice(_LMH, n, p=[0.1, 0.6, 0.3])
    school = rng.choice(np.array(["Public", "Private"]), n, p=[0.7, 0.3])
    peers = rng.choice(np.array(["Negative", "Neutral", "Positive"]), n, p=[0.2, 0.4, 0.4])
    disabilities = rng.choice(_YN, n, p=[0.9, 0.1])
    parent_edu = rng.choice(np.array(["High School", "College", "Postgraduate"]), n,
                            p=[0.5, 0.3, 0.2])
    distance = rng.choice(np.array(["Near", "Moderate", "Far"]), n, p=[0.6, 0.3, 0.1])
    gender = rng.choice(np.array(["Male", "Female"]), n, p=[0.58, 0.42])

    def ordinal(levels, arr, step):
        lut = {"Low": 0.0, "Medium": 1.0, "High": 2.0}
        return step * np.array([lut[v] for v in arr])

    score = (
        41.0
        + 0.29 * hours
        + 0.20 * attendance
        + 0.05 * previous
        + 0.55 * tutoring
        + ordinal(_LMH, involv, 0.5)
        + ordinal(_LMH, resources, 0.5)
        + ordinal(_LMH, motivation, 0.4)
        + np.where(extra == "Yes", 0.5, 0.0)
        + np.where(internet == "Yes", 0.5, 0.0)
        + np.where(peers == "Positive", 0.5, np.where(peers == "Negative", -0.5, 0.0))
        + np.where(disabilities == "Yes", -0.8, 0.0)
        + rng.normal(0.0, 1.7, n)
    )
    score = np.clip(np.rint(score), 0, 100)

    numeric = {
        "Hours_Studied": hours, "Attendance": attendance, "Sleep_Hours": sleep,
        "Previous_Scores": previous, "Tutoring_Sessions": tutoring.astype(float),
        "Physical_Activity": activity,
    }
    categorical = {
        "Parental_Involvement": involv, "Access_to_Resources": resources,
        "Extracurricular_Activities": extra, "Motivation_Level": motivation,
        "Internet_Access": internet, "Family_Income": income,
        "Teacher_Quality": teacher, "School_Type": school,
        "Peer_Influence": peers, "Learning_Disabilities": disabilities,
        "Parental_Education_Level": parent_edu, "Distance_from_Home": distance,
        "Gender": gender,
    }
    # the real file has holes in a few categorical columns; mimic that
    maskable = ("Teacher_Quality", "Parental_Education_Level", "Distance_from_Home")
    holes = {name: rng.random(n) < missing_rate for name in maskable}

    rows = []
    for i in range(n):
        cells = []
        for col in schema.columns:
            if col.name in numeric:
                cells.append(float(numeric[col.name][i]))
            else:
                v = str(categorical[col.name][i])
                if col.name in maskable and holes[col.name][i]:
                    v = None
                cells.append(v)
        rows.append(StudentRecord(id=f"original-{i + 1}", values=tuple(cells),
                                  target=float(score[i])))
    return Dataset(schema=schema, rows=tuple(rows))
