import numpy as np
import pytest

from scoreloop import (
    DataError,
    ModelError,
    TrainConfig,
    compute_gradients,
    deserialize_model,
    serialize_model,
    train,
)
from scoreloop.gbdt import fit_bins, singleton_bundles, build_bundle_columns
from scoreloop.gbdt.tree import build_histograms, build_tree, subtract_histograms
from tests.conftest import random_regression

TOY_X = np.array([[0.0], [1.0], [2.0], [3.0]])
TOY_Y = np.array([0.0, 0.0, 10.0, 10.0])
TOY_CONFIG = TrainConfig(learning_rate=1.0, num_rounds=1, max_leaves=2,
                         lam=0.0, min_samples_leaf=1)


def brute_force_stump(x, residuals, candidates):
    """Best single split by exhaustive scan (the independent oracle)."""
    best = None
    for t in candidates:
        left = residuals[x <= t]
        right = residuals[x > t]
        if len(left) == 0 or len(right) == 0:
            continue
        sse = ((left - left.mean()) ** 2).sum() + ((right - right.mean()) ** 2).sum()
        if best is None or sse < best[1]:
            best = (t, sse, left.mean(), right.mean())
    return best


class TestToyStump:
    def test_matches_exhaustive_split(self):
        model = train(TOY_X, TOY_Y, TOY_CONFIG)
        # oracle over the 3 possible split points
        t, _, lv, rv = brute_force_stump(TOY_X[:, 0], TOY_Y - TOY_Y.mean(),
                                         [0.0, 1.0, 2.0])
        tree = model.trees[0]
        assert tree.n_nodes == 3
        assert tree.threshold[0] == t == 1.0
        leaves = sorted([tree.value[1], tree.value[2]])
        assert leaves == [lv, rv] == [-5.0, 5.0]

    def test_predictions_exact(self):
        model = train(TOY_X, TOY_Y, TOY_CONFIG)
        assert model.predict_batch(TOY_X).tolist() == TOY_Y.tolist()
        assert model.predict(np.array([2.5])) == 10.0

    def test_zero_tree_model_predicts_base(self):
        model = train(TOY_X, TOY_Y, TOY_CONFIG)
        bare = deserialize_model(serialize_model(model))
        stripped = type(bare)(base_score=bare.base_score, trees=(),
                              config=bare.config, feature_names=bare.feature_names)
        assert stripped.predict(np.array([2.5])) == 5.0


def test_constant_targets_predict_constant():
    X = np.arange(20, dtype=float).reshape(-1, 1)
    y = np.full(20, 3.25)
    model = train(X, y, TrainConfig(num_rounds=5, min_samples_leaf=1))
    assert np.all(model.predict_batch(X) == 3.25)
    for t in model.trees:
        assert np.all(t.value == 0.0)


def test_gradients():
    assert compute_gradients([3.0], [3.0]).tolist() == [0.0]
    assert compute_gradients([70.46], [65.0]) == pytest.approx([5.46])
    assert compute_gradients([1.0, 2.0], [2.0, 0.0]).tolist() == [-1.0, 2.0]
    with pytest.raises(DataError):
        compute_gradients([1.0], [1.0, 2.0])


def test_nan_features_rejected():
    X = np.array([[1.0], [np.nan]])
    with pytest.raises(ModelError, match="NaN"):
        train(X, np.array([0.0, 1.0]), TOY_CONFIG)


def test_predict_dimension_mismatch(trained_small):
    model = trained_small[0]
    with pytest.raises(ModelError):
        model.predict(np.zeros(model.n_features + 1))
    with pytest.raises(ModelError):
        model.predict_batch(np.zeros((3, model.n_features - 1)))


class TestTrainingProperties:
    def test_monotone_training_loss(self):
        for seed in range(10):
            X, y = random_regression(1000, 10, seed)
            model = train(X, y, TrainConfig(num_rounds=40, lam=0.0))
            h = np.array(model.train_rmse_history)
            assert np.all(np.diff(h) <= 1e-12), f"seed {seed}"

    def test_residual_fit_consistency(self):
        # distinct x per row, a shatterable tree, one full-strength round
        X, y = random_regression(60, 3, 11)
        config = TrainConfig(learning_rate=1.0, num_rounds=1, max_leaves=60,
                             lam=0.0, min_samples_leaf=1)
        model = train(X, y, config)
        resid = y - model.predict_batch(X)
        assert np.sqrt(np.mean(resid ** 2)) < 1e-9

    def test_regularization_shrinks_leaves(self):
        # same structure forced by a single possible split; |leaf| must not grow
        X = TOY_X
        y = TOY_Y
        prev = None
        for lam in [0.0, 0.5, 2.0, 10.0]:
            cfg = TrainConfig(learning_rate=1.0, num_rounds=1, max_leaves=2,
                              lam=lam, min_samples_leaf=1)
            model = train(X, y, cfg)
            leaves = np.abs(model.trees[0].value[model.trees[0].left < 0])
            if prev is not None:
                assert np.all(leaves <= prev + 1e-12)
            prev = leaves

    def test_determinism_byte_identical(self):
        X, y = random_regression(500, 8, 4)
        cfg = TrainConfig(num_rounds=15, goss=None)
        a = serialize_model(train(X, y, cfg))
        b = serialize_model(train(X, y, cfg))
        assert a == b

    def test_cover_consistency(self, trained_small):
        model = trained_small[0]
        for t in model.trees:
            for i in range(t.n_nodes):
                if t.left[i] >= 0:
                    assert t.cover[i] == t.cover[t.left[i]] + t.cover[t.right[i]]


class TestBuildTree:
    def _setup(self, X, g, max_bins=255):
        mapper = fit_bins(X, max_bins)
        binned = mapper.transform(X)
        n_bins = [mapper.n_bins(f) for f in range(X.shape[1])]
        bundles = singleton_bundles(n_bins)
        columns = build_bundle_columns(binned, bundles)
        return mapper, binned, bundles, columns

    def test_all_zero_gradients_single_leaf(self):
        X = np.arange(10, dtype=float).reshape(-1, 1)
        g = np.zeros(10)
        mapper, binned, bundles, columns = self._setup(X, g)
        tree = build_tree(binned, columns, bundles, mapper, g, np.ones(10),
                          np.arange(10), max_leaves=5, lam=0.0, min_samples_leaf=1)
        assert tree.n_nodes == 1
        assert tree.value[0] == 0.0

    def test_chosen_gain_beats_exhaustive_scan(self):
        rng = np.random.default_rng(8)
        for trial in range(5):
            X = rng.normal(size=(100, 4))
            g = rng.normal(size=100)
            mapper, binned, bundles, columns = self._setup(X, g)
            tree = build_tree(binned, columns, bundles, mapper, g, np.ones(100),
                              np.arange(100), max_leaves=2, lam=0.0,
                              min_samples_leaf=1)
            assert tree.n_nodes == 3
            # exhaustive scan over every (feature, bin edge)
            def gain_of(f, t):
                mask = X[:, f] <= t
                gl, gr, gp = g[mask].sum(), g[~mask].sum(), g.sum()
                nl, nr = mask.sum(), (~mask).sum()
                if nl == 0 or nr == 0:
                    return -np.inf
                return gl ** 2 / nl + gr ** 2 / nr - gp ** 2 / 100
            best = max(gain_of(f, t)
                       for f in range(4) for t in mapper.upper_edges[f])
            f0, t0 = tree.feature[0], tree.threshold[0]
            assert gain_of(f0, t0) == pytest.approx(best, rel=1e-9)

    def test_histogram_subtraction_matches_direct(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(200, 5))
        g = rng.normal(size=200)
        w = np.ones(200)
        mapper, binned, bundles, columns = self._setup(X, g, max_bins=32)
        rows = np.arange(200)
        parent = build_histograms(columns, bundles, rows, g, w)
        left_rows = rows[X[:, 0] <= 0.0]
        right_rows = rows[X[:, 0] > 0.0]
        left = build_histograms(columns, bundles, left_rows, g[left_rows], w[left_rows])
        right_direct = build_histograms(columns, bundles, right_rows,
                                        g[right_rows], w[right_rows])
        right_sub = subtract_histograms(parent, left)
        for (gd, hd, cd), (gs, hs, cs) in zip(right_direct, right_sub):
            np.testing.assert_allclose(gs, gd, rtol=1e-9, atol=1e-9)
            np.testing.assert_allclose(hs, hd, rtol=1e-9, atol=1e-9)
            np.testing.assert_array_equal(cs, cd)


class TestSerialization:
    def test_roundtrip_bit_identical_predictions(self, trained_small):
        model = trained_small[0]
        again = deserialize_model(serialize_model(model))
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(1000, model.n_features))
        np.testing.assert_array_equal(model.predict_batch(pts),
                                      again.predict_batch(pts))

    def test_toy_roundtrip_100_points(self):
        model = train(TOY_X, TOY_Y, TOY_CONFIG)
        again = deserialize_model(serialize_model(model))
        pts = np.random.default_rng(1).uniform(-5, 8, size=(100, 1))
        np.testing.assert_array_equal(model.predict_batch(pts),
                                      again.predict_batch(pts))

    def test_truncated_document(self):
        model = train(TOY_X, TOY_Y, TOY_CONFIG)
        doc = serialize_model(model)
        with pytest.raises(ModelError, match="malformed"):
            deserialize_model(doc[: len(doc) // 2])

    def test_version_mismatch(self):
        model = train(TOY_X, TOY_Y, TOY_CONFIG)
        doc = serialize_model(model).replace('"version": 1', '"version": 0')
        with pytest.raises(ModelError, match="version"):
            deserialize_model(doc)


def test_config_validation():
    with pytest.raises(DataError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(DataError):
        TrainConfig(num_rounds=0)
    with pytest.raises(DataError):
        TrainConfig(max_bins=256)
    with pytest.raises(DataError):
        TrainConfig(lam=-1.0)


def test_defaults_match_reported_hyperparameters():
    cfg = TrainConfig()
    assert cfg.learning_rate == 0.05
    assert cfg.num_rounds == 100
    assert cfg.max_leaves == 31
    assert cfg.seed == 42
