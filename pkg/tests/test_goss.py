import numpy as np
import pytest

from scoreloop import DataError
from scoreloop.gbdt import goss_sample


def test_keep_everything_when_rates_sum_to_one():
    g = np.array([5.0, -1.0, 3.0, 0.5])
    idx, w = goss_sample(g, 0.5, 0.5, seed=0)
    assert sorted(idx.tolist()) == [0, 1, 2, 3]
    # top half weight 1, the rest amplified by (1-a)/b = 1
    assert np.all(w == 1.0)


def test_top_and_sampled_counts_with_weights():
    g = np.array([10.0, 9, 8, 7, 6, 5, 4, 3, 2, 1])
    idx, w = goss_sample(g, 0.2, 0.1, seed=123)
    assert len(idx) == 3
    assert {0, 1} <= set(idx.tolist())  # the two largest |gradients|
    sampled = [i for i in idx if i not in (0, 1)]
    assert len(sampled) == 1
    assert w[idx.tolist().index(sampled[0])] == pytest.approx(8.0)  # (1-0.2)/0.1


def test_deterministic_under_seed():
    g = np.random.default_rng(5).normal(size=200)
    a = goss_sample(g, 0.2, 0.1, seed=99)
    b = goss_sample(g, 0.2, 0.1, seed=99)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
    c = goss_sample(g, 0.2, 0.1, seed=100)
    assert not np.array_equal(a[0], c[0])


def test_tie_break_lowest_index_first():
    g = np.ones(10)
    idx, _ = goss_sample(g, 0.3, 0.1, seed=0)
    top = sorted(idx.tolist())[:3]
    assert {0, 1, 2} <= set(idx.tolist())


def test_invalid_rates():
    g = np.ones(5)
    for a, b in [(0.0, 0.1), (0.5, 0.6), (1.0, 0.1), (0.2, 0.0)]:
        with pytest.raises(DataError):
            goss_sample(g, a, b, seed=0)


def test_unbiased_weighted_gradient_sum():
    # statistical: mean weighted sum over 200 seeds within 2% of the full sum
    rng = np.random.default_rng(17)
    g = rng.normal(2.0, 1.0, size=500)  # shifted so the sum is far from 0
    full = g.sum()
    sums = []
    for seed in range(200):
        idx, w = goss_sample(g, 0.2, 0.1, seed=seed)
        sums.append(float((g[idx] * w).sum()))
    assert abs(np.mean(sums) - full) / abs(full) < 0.02
