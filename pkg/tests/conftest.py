import numpy as np
import pytest

from scoreloop import TrainConfig, fit_preprocessor, split, train, transform_dataset
from scoreloop.synthetic import generate_dataset


@pytest.fixture(scope="session")
def synth_full():
    """Full-size synthetic stand-in for the 6,607-row exam dataset."""
    return generate_dataset(6607, seed=7)


@pytest.fixture(scope="session")
def synth_small():
    return generate_dataset(800, seed=3)


@pytest.fixture(scope="session")
def trained_small(synth_small):
    """(model, state, Xtest, ytest, schema) on the small synthetic set."""
    tr, te = split(synth_small, 0.2, 42)
    state = fit_preprocessor(tr)
    X, y = transform_dataset(tr, state)
    Xt, yt = transform_dataset(te, state)
    config = TrainConfig(num_rounds=30)
    model = train(X, y, config, feature_names=synth_small.schema.input_names)
    return model, state, Xt, yt, synth_small.schema


def random_regression(n, d, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    coef = rng.normal(size=d)
    y = X @ coef + 0.5 * rng.normal(size=n)
    return X, y
