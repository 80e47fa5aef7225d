"""Candidate ranking, recourse paths with undo, and the greedy planner.

Paths are persistent values: extend and undo return new paths and never
mutate their input, which makes undo an exact structural inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .attribution import (
    AttributionVector,
    BackgroundSet,
    assign_display_ranks,
    group_others,
    importance_from_vectors,
    shapley_exact,
)
from .dataset import Dataset, FeatureSchema, SubjectRecord
from .errors import EmptyPath, NotACandidate, SameSubject, UnknownSubject

PROJECTION_EPS = 1e-6

TARGET_REACHED = "target_reached"
STUCK = "stuck"
BUDGET = "budget"

DEFAULT_TARGET_OUTCOME = 0.8
DEFAULT_MAX_STEPS = 10


@dataclass(frozen=True)
class ConstraintSet:
    """Filters applied when enumerating candidate next states."""

    immutable_features: frozenset[str] = frozenset()
    immutable_tolerance: float = 0.05
    require_improvement: bool = True
    max_l1_radius: float | None = None
    exclude_visited: bool = True

    def __post_init__(self) -> None:
        if self.immutable_tolerance < 0:
            raise ValueError("immutable_tolerance must be >= 0")
        if self.max_l1_radius is not None and self.max_l1_radius <= 0:
            raise ValueError("max_l1_radius must be positive when bounded")


@dataclass(frozen=True)
class CandidateTarget:
    """A reachable next state with its ranking metadata."""

    subject_id: str
    projection: float
    l1_change: float
    outcome_gain: float
    per_feature_delta: Mapping[str, tuple[float, float]]  # (raw delta, phi delta)
    top3: bool


@dataclass(frozen=True)
class RecourseState:
    """One visited state: raw values, outcome, grouped attribution, deviation."""

    subject_id: str
    values: Mapping[str, float]
    outcome: float
    attribution: AttributionVector
    deviation: Mapping[str, float]
    step_projection: float | None = None
    step_l1_change: float | None = None
    step_outcome_gain: float | None = None


@dataclass(frozen=True)
class RecoursePath:
    """Ordered visited states; empty until a start is selected."""

    states: tuple[RecourseState, ...] = ()
    target_outcome: float = DEFAULT_TARGET_OUTCOME

    def __len__(self) -> int:
        return len(self.states)

    @property
    def last(self) -> RecourseState:
        if not self.states:
            raise EmptyPath()
        return self.states[-1]

    @property
    def subject_ids(self) -> tuple[str, ...]:
        return tuple(s.subject_id for s in self.states)


def deviation_stats(
    values: Mapping[str, float], schema: Sequence[FeatureSchema]
) -> dict[str, float]:
    """Normalized value minus normalized dataset mean, per feature."""
    out: dict[str, float] = {}
    for f in schema:
        current = (values[f.name] - f.min) / f.span
        mean = (f.mean - f.min) / f.span
        out[f.name] = current - mean
    return out


def trajectory_slope(
    a: RecourseState, b: RecourseState, feature: str
) -> float | None:
    """Attribution change per raw unit of feature change between two states.

    Undefined (None) when the feature value barely moves.
    """
    dx = b.values[feature] - a.values[feature]
    if abs(dx) <= 1e-12:
        return None
    dphi = b.attribution.phi[feature] - a.attribution.phi[feature]
    return dphi / dx


def undo(path: RecoursePath) -> RecoursePath:
    """Drop the last state; exact inverse of the extend that added it."""
    if not path.states:
        raise EmptyPath()
    return replace(path, states=path.states[:-1])


class RecourseEngine:
    """Shared read-only context: dataset, scorer, background, attributions.

    Construction precomputes the full attribution table, global feature
    importance, and the displayed top features, so path and candidate
    operations afterwards are lookups plus vector arithmetic.
    """

    def __init__(
        self,
        dataset: Dataset,
        model,
        background: BackgroundSet | None = None,
        background_size: int = 32,
        background_seed: int = 42,
        displayed_count: int = 6,
    ):
        self.dataset = dataset
        self.model = model
        self.background = background or BackgroundSet.from_dataset(
            dataset, size=background_size, seed=background_seed
        )
        fast = getattr(model, "score_rows", None)
        if fast is not None:
            self.outcomes = np.asarray(fast(dataset.feature_names, dataset.raw), dtype=float)
        else:
            self.outcomes = np.array([model.score(r.values) for r in dataset.records])

        self.attributions: dict[str, AttributionVector] = {
            record.id: shapley_exact(
                model, record, self.background, dataset.feature_names
            )
            for record in dataset.records
        }
        self.importance = importance_from_vectors(
            [self.attributions[i] for i in dataset.ids], dataset.feature_names
        )
        self.displayed: tuple[str, ...] = tuple(
            name for name, _ in self.importance[:displayed_count]
        )
        self.schema: list[FeatureSchema] = assign_display_ranks(
            dataset.schema, self.importance, count=displayed_count
        )
        self._mean_norm = dataset.mean_norm

    # -- states ------------------------------------------------------------

    def _index(self, subject_id: str) -> int:
        try:
            return self.dataset.index_of[subject_id]
        except KeyError:
            raise UnknownSubject(subject_id) from None

    def grouped_attribution(self, subject_id: str) -> AttributionVector:
        self._index(subject_id)
        return group_others(self.attributions[subject_id], self.displayed)

    def state_for(
        self,
        subject_id: str,
        step: tuple[float, float, float] | None = None,
    ) -> RecourseState:
        idx = self._index(subject_id)
        record = self.dataset.records[idx]
        projection, l1, gain = step if step is not None else (None, None, None)
        return RecourseState(
            subject_id=subject_id,
            values=dict(record.values),
            outcome=float(self.outcomes[idx]),
            attribution=self.grouped_attribution(subject_id),
            deviation=deviation_stats(record.values, self.dataset.schema),
            step_projection=projection,
            step_l1_change=l1,
            step_outcome_gain=gain,
        )

    # -- candidate scoring ---------------------------------------------------

    def projection_score(
        self, current: RecourseState, candidate: SubjectRecord
    ) -> tuple[float, float, float]:
        """(projection, l1_change, outcome_gain) of moving to the candidate.

        l1 runs over every schema feature in normalized units; the
        epsilon guard keeps zero-change candidates finite.
        """
        if candidate.id == current.subject_id:
            raise SameSubject(candidate.id)
        cand_norm = self.dataset.normalize_row(candidate.values)
        cur_norm = self.dataset.normalize_row(current.values)
        l1 = float(np.abs(cand_norm - cur_norm).sum())
        gain = float(self.outcomes[self._index(candidate.id)]) - current.outcome
        projection = gain / max(PROJECTION_EPS, l1)
        return projection, l1, gain

    def find_candidates(
        self,
        current: RecourseState,
        constraints: ConstraintSet,
        path: RecoursePath,
    ) -> list[CandidateTarget]:
        """All passing subjects ranked by (projection desc, l1 asc, id asc)."""
        ds = self.dataset
        cur_norm = ds.normalize_row(current.values)
        l1 = np.abs(ds.norm - cur_norm).sum(axis=1)
        gain = self.outcomes - current.outcome

        keep = np.ones(len(ds), dtype=bool)
        keep[ds.index_of[current.subject_id]] = False
        if constraints.exclude_visited:
            for visited in path.subject_ids:
                keep[ds.index_of[visited]] = False
        if constraints.immutable_features:
            for name in constraints.immutable_features:
                col = ds.feature_names.index(name)
                keep &= (
                    np.abs(ds.norm[:, col] - cur_norm[col])
                    <= constraints.immutable_tolerance
                )
        if constraints.max_l1_radius is not None:
            keep &= l1 <= constraints.max_l1_radius
        if constraints.require_improvement:
            keep &= gain > 0

        projection = gain / np.maximum(PROJECTION_EPS, l1)
        picked = [
            (ds.ids[i], float(projection[i]), float(l1[i]), float(gain[i]))
            for i in np.flatnonzero(keep)
        ]
        picked.sort(key=lambda c: (-c[1], c[2], c[0]))

        current_phi = self.attributions[current.subject_id].phi
        candidates: list[CandidateTarget] = []
        for rank, (subject_id, proj, dist, g) in enumerate(picked):
            record = ds.record(subject_id)
            cand_phi = self.attributions[subject_id].phi
            delta = {
                name: (
                    record.values[name] - current.values[name],
                    cand_phi[name] - current_phi[name],
                )
                for name in ds.feature_names
            }
            candidates.append(
                CandidateTarget(
                    subject_id=subject_id,
                    projection=proj,
                    l1_change=dist,
                    outcome_gain=g,
                    per_feature_delta=delta,
                    top3=rank < 3,
                )
            )
        return candidates

    # -- path construction ---------------------------------------------------

    def start_path(
        self, subject_id: str, target_outcome: float = DEFAULT_TARGET_OUTCOME
    ) -> RecoursePath:
        return RecoursePath(
            states=(self.state_for(subject_id),), target_outcome=target_outcome
        )

    def extend_path(
        self,
        path: RecoursePath,
        chosen: str,
        constraints: ConstraintSet | None = None,
    ) -> RecoursePath:
        """Append the chosen candidate as a new state; the input is unchanged."""
        if not path.states:
            raise EmptyPath()
        constraints = constraints or ConstraintSet()
        candidates = self.find_candidates(path.last, constraints, path)
        match = next((c for c in candidates if c.subject_id == chosen), None)
        if match is None:
            raise NotACandidate(chosen)
        return self._extend_with(path, match)

    def _extend_with(self, path: RecoursePath, candidate: CandidateTarget) -> RecoursePath:
        state = self.state_for(
            candidate.subject_id,
            step=(candidate.projection, candidate.l1_change, candidate.outcome_gain),
        )
        return replace(path, states=path.states + (state,))

    def greedy_plan(
        self,
        start: str,
        constraints: ConstraintSet | None = None,
        target_outcome: float = DEFAULT_TARGET_OUTCOME,
        max_steps: int = DEFAULT_MAX_STEPS,
    ) -> tuple[RecoursePath, str]:
        """Repeatedly take the top-ranked candidate until target, stuck, or budget."""
        if max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        constraints = constraints or ConstraintSet()
        path = self.start_path(start, target_outcome)
        if path.last.outcome >= target_outcome:
            return path, TARGET_REACHED
        for _ in range(max_steps):
            candidates = self.find_candidates(path.last, constraints, path)
            if not candidates:
                return path, STUCK
            path = self._extend_with(path, candidates[0])
            if path.last.outcome >= target_outcome:
                return path, TARGET_REACHED
        return path, BUDGET
