"""Rank candidate next states, build a path step by step, then backtrack."""

import pathlib

import numpy as np

from recoursekit import ConstraintSet, RecourseEngine, trajectory_slope, undo
from recoursekit.dataset import Dataset
from recoursekit.model import load_model

ROOT = pathlib.Path(__file__).resolve().parent.parent
ds = Dataset.load(ROOT / "data" / "credit_risk.csv")
model = load_model(ROOT / "data" / "model.tsv", ds.schema)
engine = RecourseEngine(ds, model)

start = ds.ids[int(np.argsort(engine.outcomes)[10])]
path = engine.start_path(start)
print(f"start: {start} outcome={path.last.outcome:.3f}")

constraints = ConstraintSet(max_l1_radius=2.0)
candidates = engine.find_candidates(path.last, constraints, path)
print(f"\n{len(candidates)} candidates within l1 radius 2.0; top five:")
print(f"{'id':<6}{'projection':>12}{'l1':>8}{'gain':>8}  top3")
for c in candidates[:5]:
    print(f"{c.subject_id:<6}{c.projection:>12.4f}{c.l1_change:>8.3f}{c.outcome_gain:>8.3f}  {c.top3}")

# what the best candidate changes, feature by feature
best = candidates[0]
print(f"\nmoving to {best.subject_id} changes:")
for name, (dv, dphi) in best.per_feature_delta.items():
    if abs(dphi) > 0.005:
        print(f"  {name:<24} value {dv:>+12.2f}   phi {dphi:>+8.4f}")

path = engine.extend_path(path, best.subject_id, constraints)
print(f"\nafter step 1: outcome={path.last.outcome:.3f}")

# slope of the step for a displayed feature: attribution gain per raw unit
a, b = path.states
for name in engine.displayed[:3]:
    slope = trajectory_slope(a, b, name)
    if slope is not None:
        print(f"  {name}: {slope:+.4f} per raw unit")

# deviations drive the lower half of the outcome monitor
print("\ndeviation from the dataset average (normalized units):")
for name in engine.displayed:
    print(f"  {name:<24}{path.last.deviation[name]:>+8.3f}")

# paths are values: undo returns the exact prior object state
shorter = undo(path)
print(f"\nundo -> back to {shorter.last.subject_id}, outcome={shorter.last.outcome:.3f}")
print(f"structural equality with the pre-step path: {shorter == engine.start_path(start)}")
