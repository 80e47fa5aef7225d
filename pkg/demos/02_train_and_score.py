"""Train the logistic scorer and look at the probability landscape."""

import pathlib

import numpy as np

from recoursekit import TrainConfig, train_logistic
from recoursekit.dataset import Dataset

DATA = pathlib.Path(__file__).resolve().parent.parent / "data" / "credit_risk.csv"

ds = Dataset.load(DATA)
model = train_logistic(ds.records, ds.schema, TrainConfig())

print("loss trajectory (every 400 epochs):")
for i in range(0, len(model.loss_history), 400):
    print(f"  epoch {i:>5}: {model.loss_history[i]:.6f}")

print("\nweights on normalized features:")
for name in model.feature_order:
    print(f"  {name:<24}{model.weights[name]:>8.3f}")
print(f"  {'(bias)':<24}{model.bias:>8.3f}")

scores = model.score_rows(ds.feature_names, ds.raw)
print("\napproval-odds distribution across subjects:")
for q in (0, 10, 25, 50, 75, 90, 100):
    print(f"  p{q:>3}: {np.percentile(scores, q):.3f}")

# the model is monotone in each single feature, direction given by its weight
subject = dict(ds.records[0].values)
low = model.score(dict(subject, income=30000.0))
high = model.score(dict(subject, income=140000.0))
print(f"\nsame subject, income 30k vs 140k: {low:.3f} -> {high:.3f}")
