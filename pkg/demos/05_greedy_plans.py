"""Batch greedy planning toward ~80% approval odds, with and without limits."""

import pathlib

import numpy as np

from recoursekit import ConstraintSet, RecourseEngine
from recoursekit.dataset import Dataset
from recoursekit.model import load_model

ROOT = pathlib.Path(__file__).resolve().parent.parent
ds = Dataset.load(ROOT / "data" / "credit_risk.csv")
model = load_model(ROOT / "data" / "model.tsv", ds.schema)
engine = RecourseEngine(ds, model)

bottom = [ds.ids[int(i)] for i in np.argsort(engine.outcomes)[:5]]

print("unconstrained greedy, target 0.8:")
for sid in bottom:
    path, reason = engine.greedy_plan(sid, target_outcome=0.8)
    chain = " -> ".join(f"{s.subject_id}({s.outcome:.2f})" for s in path.states)
    print(f"  {chain}  [{reason}]")

print("\nsame starts, but each step limited to l1 radius 2.0:")
constraints = ConstraintSet(max_l1_radius=2.0)
for sid in bottom:
    path, reason = engine.greedy_plan(sid, constraints=constraints, target_outcome=0.8)
    chain = " -> ".join(f"{s.subject_id}({s.outcome:.2f})" for s in path.states)
    print(f"  {chain}  [{reason}]")

print("\nholding age and income fixed (tolerance 0.05 normalized):")
constraints = ConstraintSet(immutable_features=frozenset({"age", "income"}))
for sid in bottom:
    path, reason = engine.greedy_plan(sid, constraints=constraints, target_outcome=0.8)
    chain = " -> ".join(f"{s.subject_id}({s.outcome:.2f})" for s in path.states)
    print(f"  {chain}  [{reason}]")
