"""Independent reference implementations used as test oracles.

Everything here deliberately avoids the library's vectorized code paths:
scoring goes through per-record dicts, enumeration through
itertools.combinations, and ranking through plain-python sorts.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from recoursekit.dataset import Dataset, SubjectRecord
from recoursekit.recourse import PROJECTION_EPS, ConstraintSet


class ConstantScorer:
    def __init__(self, value: float):
        self.value = value

    def score(self, values):
        return self.value


class LinearScorer:
    """bias + sum of w_f * normalized_f(x); unsquashed test scorer."""

    def __init__(self, weights, bias, schema):
        self.weights = dict(weights)
        self.bias = bias
        self.schema = list(schema)
        self.feature_order = tuple(f.name for f in schema)
        self._w = np.array([self.weights[f.name] for f in schema])
        self._mins = np.array([f.min for f in schema])
        self._spans = np.array([f.max - f.min for f in schema])

    def score(self, values):
        row = np.array([values[name] for name in self.feature_order])
        return float(self.score_rows(self.feature_order, row[None, :])[0])

    def score_rows(self, feature_names, raw):
        assert tuple(feature_names) == self.feature_order
        norm = (np.asarray(raw, dtype=float) - self._mins) / self._spans
        return norm @ self._w + self.bias


class DictOnlyScorer:
    """Strips the vectorized fast path so the fallback loop is exercised."""

    def __init__(self, inner):
        self._inner = inner

    def score(self, values):
        return self._inner.score(values)


def shapley_oracle(model, subject, background, feature_names):
    """Name-subset enumeration of exact Shapley values; returns (base, phi)."""
    M = len(feature_names)
    cache: dict[frozenset, float] = {}

    def v(subset: frozenset) -> float:
        if subset in cache:
            return cache[subset]
        total = 0.0
        for rec in background.records:
            composite = {
                name: (subject.values[name] if name in subset else rec.values[name])
                for name in feature_names
            }
            total += model.score(composite)
        out = total / len(background.records)
        cache[subset] = out
        return out

    phi: dict[str, float] = {}
    for name in feature_names:
        rest = [n for n in feature_names if n != name]
        acc = 0.0
        for size in range(M):
            weight = (
                math.factorial(size)
                * math.factorial(M - size - 1)
                / math.factorial(M)
            )
            for combo in combinations(rest, size):
                s = frozenset(combo)
                acc += weight * (v(s | {name}) - v(s))
        phi[name] = acc
    return v(frozenset()), phi


def normalize_oracle(values, schema):
    return {f.name: (values[f.name] - f.min) / (f.max - f.min) for f in schema}


def candidate_ranking_oracle(
    dataset: Dataset,
    model,
    current: SubjectRecord,
    current_outcome: float,
    constraints: ConstraintSet,
    visited: set[str],
):
    """Plain-python re-derivation of the ranked candidate list.

    Returns [(subject_id, projection, l1, gain)] in engine ranking order.
    """
    cur_norm = normalize_oracle(current.values, dataset.schema)
    rows = []
    for rec in dataset.records:
        if rec.id == current.id:
            continue
        if constraints.exclude_visited and rec.id in visited:
            continue
        cand_norm = normalize_oracle(rec.values, dataset.schema)
        ok = True
        for name in constraints.immutable_features:
            if abs(cand_norm[name] - cur_norm[name]) > constraints.immutable_tolerance:
                ok = False
                break
        if not ok:
            continue
        l1 = sum(abs(cand_norm[f.name] - cur_norm[f.name]) for f in dataset.schema)
        if constraints.max_l1_radius is not None and l1 > constraints.max_l1_radius:
            continue
        gain = model.score(rec.values) - current_outcome
        if constraints.require_improvement and not gain > 0:
            continue
        rows.append((rec.id, gain / max(PROJECTION_EPS, l1), l1, gain))
    rows.sort(key=lambda r: (-r[1], r[2], r[0]))
    return rows


def greedy_oracle(dataset, model, start_id, constraints, target, max_steps):
    """Exhaustive greedy re-enactment on top of the ranking oracle."""
    outcome = model.score(dataset.record(start_id).values)
    ids = [start_id]
    if outcome >= target:
        return ids, "target_reached"
    for _ in range(max_steps):
        ranked = candidate_ranking_oracle(
            dataset, model, dataset.record(ids[-1]), outcome, constraints, set(ids)
        )
        if not ranked:
            return ids, "stuck"
        chosen, _, _, gain = ranked[0]
        ids.append(chosen)
        outcome = outcome + gain
        if outcome >= target:
            return ids, "target_reached"
    return ids, "budget"
