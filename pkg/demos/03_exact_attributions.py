"""Exact Shapley attributions: efficiency, grouping, and the outcome stack."""

import pathlib

from recoursekit import (
    BackgroundSet,
    group_others,
    shapley_exact,
    stack_top,
    stacked_segments,
)
from recoursekit.attribution import importance_from_vectors
from recoursekit.dataset import Dataset
from recoursekit.model import load_model

ROOT = pathlib.Path(__file__).resolve().parent.parent
ds = Dataset.load(ROOT / "data" / "credit_risk.csv")
model = load_model(ROOT / "data" / "model.tsv", ds.schema)
background = BackgroundSet.from_dataset(ds, size=32, seed=42)

subject = ds.record("c007")
av = shapley_exact(model, subject, background, ds.feature_names)
score = model.score(subject.values)

print(f"subject {subject.id}: outcome {score:.4f}, base {av.base:.4f}")
print(f"efficiency gap: {abs(av.total - score):.2e}\n")

print("per-feature contributions (probability units):")
for name, phi in sorted(av.phi.items(), key=lambda kv: -abs(kv[1])):
    print(f"  {name:<24}{phi:>+9.4f}")

# global importance picks the six features the companion UI displays
vectors = [shapley_exact(model, r, background, ds.feature_names) for r in ds.records[:60]]
ranking = importance_from_vectors(vectors, ds.feature_names)
displayed = [name for name, _ in ranking[:6]]
print("\ntop-6 by mean |phi| over 60 subjects:")
for name, imp in ranking[:6]:
    print(f"  {name:<24}{imp:.4f}")

# collapsing the other five keeps the additive identity exact
grouped = group_others(av, displayed)
print(f"\nothers (5 hidden features folded together): {grouped.others:+.4f}")

print("\noutcome stack, bottom to top:")
for seg in stacked_segments(grouped):
    print(f"  {seg.sign:<9} {seg.label:<24} {seg.y_from:>+8.4f} -> {seg.y_to:>+8.4f}")
print(f"stack top = {stack_top(stacked_segments(grouped)):.4f} (the model outcome)")
