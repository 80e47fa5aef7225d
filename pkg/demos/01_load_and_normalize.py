"""Walk through dataset loading, schema statistics, and normalization."""

import pathlib

from recoursekit import dataset_mean_normalized, denormalize, normalize
from recoursekit.dataset import Dataset

DATA = pathlib.Path(__file__).resolve().parent.parent / "data" / "credit_risk.csv"

ds = Dataset.load(DATA)
print(f"loaded {len(ds)} subjects, {len(ds.feature_names)} features\n")

print(f"{'feature':<24}{'min':>12}{'max':>12}{'mean':>14}")
for f in ds.schema:
    print(f"{f.name:<24}{f.min:>12.2f}{f.max:>12.2f}{f.mean:>14.2f}")

# every raw record maps into the unit cube and back, losslessly
record = ds.records[0]
nv = normalize(record, ds.schema)
back = denormalize(nv, ds.schema)
worst = max(abs(back[n] - record.values[n]) for n in ds.feature_names)
print(f"\nsubject {record.id}: normalized income = {nv.values['income']:.4f}")
print(f"round-trip worst absolute error: {worst:.2e}")

# the dataset average in normalized units anchors the deviation plot
mean_nv = dataset_mean_normalized(ds.schema)
print("\nnormalized dataset means:")
for name in ("income", "loan_percent_income", "credit_history_length"):
    print(f"  {name:<24}{mean_nv.values[name]:.4f}")
