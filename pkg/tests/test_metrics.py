import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scoreloop import DataError, compute_report, explained_variance, mae, mape, r2, rmse


# ---- independent straight-line oracles (no numpy) --------------------------

def oracle_rmse(y, yhat):
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(y, yhat)) / len(y))


def oracle_mae(y, yhat):
    return sum(abs(a - b) for a, b in zip(y, yhat)) / len(y)


def oracle_r2(y, yhat):
    ybar = sum(y) / len(y)
    ss_res = sum((a - b) ** 2 for a, b in zip(y, yhat))
    ss_tot = sum((a - ybar) ** 2 for a in y)
    return 1 - ss_res / ss_tot


def oracle_mape(y, yhat):
    return 100 * sum(abs((a - b) / a) for a, b in zip(y, yhat)) / len(y)


def oracle_explained_variance(y, yhat):
    def var(v):
        m = sum(v) / len(v)
        return sum((a - m) ** 2 for a in v) / len(v)

    resid = [a - b for a, b in zip(y, yhat)]
    return 1 - var(resid) / var(y)


ORACLES = [
    (rmse, oracle_rmse),
    (mae, oracle_mae),
    (r2, oracle_r2),
    (mape, oracle_mape),
    (explained_variance, oracle_explained_variance),
]


def test_oracle_equivalence_1000_pairs():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(2, 40))
        y = rng.uniform(1.0, 100.0, n)      # strictly positive, non-constant w.h.p.
        yhat = y + rng.normal(0, 5.0, n)
        if np.var(y) == 0:
            continue
        for fn, oracle in ORACLES:
            got = fn(y, yhat)
            want = oracle(y.tolist(), yhat.tolist())
            assert got == pytest.approx(want, rel=1e-9), fn.__name__


# ---- frozen examples --------------------------------------------------------

def test_perfect_predictions():
    y = [1.0, 2.0, 3.0]
    assert rmse(y, y) == 0.0
    assert mae(y, y) == 0.0
    assert r2(y, y) == 1.0
    assert mape(y, y) == 0.0
    assert explained_variance(y, y) == 1.0


def test_fixed_values():
    y, yhat = [1.0, 2.0, 3.0], [2.0, 2.0, 2.0]
    assert rmse(y, yhat) == pytest.approx(math.sqrt(2 / 3), abs=1e-12)
    assert mae(y, yhat) == pytest.approx(2 / 3, abs=1e-12)
    assert r2(y, yhat) == pytest.approx(0.0, abs=1e-12)
    # oracle-computed before build: residuals [-1,0,1] have the same
    # population variance as y, so explained variance is 0
    assert explained_variance(y, yhat) == pytest.approx(
        oracle_explained_variance(y, yhat), abs=1e-12)
    assert explained_variance(y, yhat) == pytest.approx(0.0, abs=1e-12)


def test_mape_fixed():
    assert mape([100.0, 50.0], [90.0, 55.0]) == pytest.approx(10.0, abs=1e-12)


def test_mean_prediction_gives_zero_r2():
    y = [1.0, 5.0, 9.0]
    yhat = [5.0, 5.0, 5.0]
    assert r2(y, yhat) == pytest.approx(0.0, abs=1e-12)


def test_unbiased_errors_make_ev_equal_r2():
    rng = np.random.default_rng(1)
    y = rng.uniform(10, 90, 100)
    err = rng.normal(0, 2, 100)
    err -= err.mean()  # exactly zero-mean residuals
    yhat = y - err
    assert explained_variance(y, yhat) == pytest.approx(r2(y, yhat), abs=1e-9)


# ---- errors ------------------------------------------------------------------

def test_errors():
    with pytest.raises(DataError):
        rmse([], [])
    with pytest.raises(DataError):
        mae([1.0], [1.0, 2.0])
    with pytest.raises(DataError, match="variance"):
        r2([2.0, 2.0], [1.0, 3.0])
    with pytest.raises(DataError, match="zero"):
        mape([0.0, 1.0], [1.0, 1.0])
    with pytest.raises(DataError, match="variance"):
        explained_variance([2.0, 2.0], [1.0, 3.0])


# ---- properties ---------------------------------------------------------------

vectors = st.integers(2, 30).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(1.0, 100.0), min_size=n, max_size=n),
        st.lists(st.floats(1.0, 100.0), min_size=n, max_size=n),
    )
)


@given(vectors)
@settings(max_examples=200, deadline=None)
def test_rmse_at_least_mae(pair):
    y, yhat = pair
    assert rmse(y, yhat) >= mae(y, yhat) - 1e-12


@given(vectors, st.floats(0.1, 10.0))
@settings(max_examples=100, deadline=None)
def test_scale_behavior(pair, c):
    y, yhat = np.array(pair[0]), np.array(pair[1])
    if np.var(y) == 0:
        return
    assert rmse(c * y, c * yhat) == pytest.approx(c * rmse(y, yhat), rel=1e-9)
    assert mae(c * y, c * yhat) == pytest.approx(c * mae(y, yhat), rel=1e-9)
    assert r2(c * y, c * yhat) == pytest.approx(r2(y, yhat), rel=1e-9, abs=1e-9)
    assert mape(c * y, c * yhat) == pytest.approx(mape(y, yhat), rel=1e-9, abs=1e-9)
    assert explained_variance(c * y, c * yhat) == pytest.approx(
        explained_variance(y, yhat), rel=1e-9, abs=1e-9)


def test_report_invariants():
    rng = np.random.default_rng(2)
    y = rng.uniform(10, 90, 50)
    yhat = y + rng.normal(0, 3, 50)
    rep = compute_report(y, yhat, label="phase")
    assert rep.rmse >= rep.mae >= 0
    assert rep.r2 <= 1
    assert rep.mape_percent >= 0
    assert rep.n == 50
    assert rep.phase_label == "phase"
