"""
Train a gradient-boosted exam-score model and evaluate it
=========================================================

Walks the core path: generate a synthetic student dataset, split it,
fit the preprocessor, train the boosted ensemble, and score it with
the five regression metrics.
"""

# the library ships a calibrated synthetic generator because the real
# per-student CSV cannot be redistributed; same 19-column schema
from scoreloop.synthetic import generate_dataset

data = generate_dataset(n=3000, seed=7)
print(f"{data.n} students, {data.schema.n_features} input columns")

# hold out 20% as a frozen test set
from scoreloop import split

train_set, test_set = split(data, test_fraction=0.2, seed=42)
print(f"train {train_set.n}, test {test_set.n}")

# fit encoding / imputation / scaling statistics on the training rows only
from scoreloop import fit_preprocessor, transform_dataset

state = fit_preprocessor(train_set)
X, y = transform_dataset(train_set, state)
Xt, yt = transform_dataset(test_set, state)

# train with the defaults: 100 rounds, learning rate 0.05, 31 leaves
from scoreloop import TrainConfig, train

model = train(X, y, TrainConfig(), feature_names=data.schema.input_names)
print(f"{len(model.trees)} trees, base score {model.base_score:.2f}")

# training RMSE is recorded per round and never increases
hist = model.train_rmse_history
print(f"train RMSE round 1 -> {hist[0]:.3f}, round {len(hist)} -> {hist[-1]:.3f}")

# evaluate on the held-out rows
from scoreloop.metrics import compute_report

report = compute_report(yt, model.predict_batch(Xt), label="Initial")
print(f"test RMSE {report.rmse:.3f}  MAE {report.mae:.3f}  "
      f"R2 {report.r2:.3f}  MAPE {report.mape_percent:.2f}%")
