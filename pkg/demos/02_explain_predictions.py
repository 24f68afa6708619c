"""
Explain individual score predictions
====================================

Per-feature attributions for a single student: each feature gets a
signed contribution, and base value plus all contributions reproduces
the prediction exactly (local accuracy).
"""

from scoreloop import TrainConfig, fit_preprocessor, split, train, transform_dataset
from scoreloop.explain import explain, global_importance
from scoreloop.synthetic import generate_dataset

data = generate_dataset(n=2000, seed=7)
train_set, test_set = split(data, 0.2, 42)
state = fit_preprocessor(train_set)
X, y = transform_dataset(train_set, state)
Xt, yt = transform_dataset(test_set, state)
model = train(X, y, TrainConfig(num_rounds=60),
              feature_names=data.schema.input_names)

# explain the first held-out student
x = Xt[0]
result = explain(model, x)
print(f"prediction {result.prediction:.2f} = baseline {result.base_value:.2f} "
      f"+ {result.contributions.sum():+.2f} of attributions")

# rows come back sorted by |contribution|, strongest driver first
for row in result.to_rows(model.feature_names, x)[:6]:
    print(f"  {row['feature']:<24} {row['phi']:+7.3f}")

# local accuracy: the attribution identity holds to machine precision
gap = abs(result.base_value + result.contributions.sum() - model.predict(x))
print(f"local accuracy gap: {gap:.2e}")

# global importance = mean |contribution| over a sample of rows
imp = global_importance(model, Xt[:200])
top = [model.feature_names[j] for j in imp.ranking[:5]]
print("top five drivers:", ", ".join(top))
