"""Exact Shapley attributions by coalition enumeration over a background set.

The value function is interventional: v(S) is the mean model score over
background records after overwriting the coalition's features with the
subject's values. Every coalition is evaluated exactly once per subject,
so a call costs 2^M set-function evaluations (each a B-row model batch).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import factorial
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dataset import Dataset, FeatureSchema, SubjectRecord
from .errors import (
    EmptyBackground,
    TooManyFeatures,
    UngroupedVector,
    UnknownFeature,
)

MAX_ENUM_FEATURES = 15
MAX_DISPLAYED = 6
EFFICIENCY_TOL = 1e-9

# Cap on coalition rows materialized at once (memory, not semantics).
_COALITION_CHUNK = 4096


@dataclass(frozen=True)
class BackgroundSet:
    """Reference records that define the value function's expectation."""

    records: tuple[SubjectRecord, ...]
    source: str  # "sampled" | "full"

    @classmethod
    def from_dataset(cls, dataset: Dataset, size: int = 32, seed: int = 42) -> "BackgroundSet":
        """Deterministic uniform sample without replacement; full set if small."""
        if len(dataset) <= size:
            return cls(records=tuple(dataset.records), source="full")
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(len(dataset), size=size, replace=False))
        return cls(records=tuple(dataset.records[i] for i in idx), source="sampled")


@dataclass(frozen=True)
class AttributionVector:
    """Base value plus per-feature contributions in probability units.

    ``displayed`` is None for a full vector covering every schema feature
    (others == 0); after :func:`group_others` it names the kept features
    and ``others`` absorbs the complement.
    """

    subject_id: str
    base: float
    phi: Mapping[str, float]
    others: float = 0.0
    displayed: tuple[str, ...] | None = None

    @property
    def total(self) -> float:
        return self.base + sum(self.phi.values()) + self.others


@dataclass(frozen=True)
class Segment:
    """One block of the outcome decomposition stack."""

    sign: str  # "negative" | "base" | "positive"
    label: str  # feature name, "base", or "others"
    y_from: float
    y_to: float


def _score_rows(model, feature_names: Sequence[str], raw: np.ndarray) -> np.ndarray:
    fast = getattr(model, "score_rows", None)
    if fast is not None:
        return np.asarray(fast(feature_names, raw), dtype=float)
    return np.array(
        [model.score(dict(zip(feature_names, row))) for row in raw], dtype=float
    )


def coalition_values(
    model,
    subject: SubjectRecord,
    background: BackgroundSet,
    feature_names: Sequence[str],
) -> np.ndarray:
    """v(S) for every coalition, indexed by feature bitmask.

    v(S) = mean over background b of score(subject values on S, b elsewhere).
    """
    M = len(feature_names)
    if M > MAX_ENUM_FEATURES:
        raise TooManyFeatures(M, MAX_ENUM_FEATURES)
    if not background.records:
        raise EmptyBackground()

    x = np.array([subject.values[name] for name in feature_names])
    Z = np.array(
        [[r.values[name] for name in feature_names] for r in background.records]
    )
    B = Z.shape[0]
    n_coalitions = 1 << M
    v = np.empty(n_coalitions)
    feature_bits = np.arange(M)
    for lo in range(0, n_coalitions, _COALITION_CHUNK):
        hi = min(lo + _COALITION_CHUNK, n_coalitions)
        masks = np.arange(lo, hi)
        member = ((masks[:, None] >> feature_bits) & 1).astype(bool)  # (c, M)
        composite = np.where(member[:, None, :], x, Z)  # (c, B, M)
        scores = _score_rows(model, feature_names, composite.reshape(-1, M))
        v[lo:hi] = scores.reshape(hi - lo, B).mean(axis=1)
    return v


def shapley_from_coalition_values(v: np.ndarray, n_features: int) -> np.ndarray:
    """Classic weighted marginal-contribution sum over the v(S) table."""
    masks = np.arange(1 << n_features)
    sizes = np.bitwise_count(masks)
    fact_m = factorial(n_features)
    weight_by_size = np.array(
        [factorial(s) * factorial(n_features - s - 1) / fact_m for s in range(n_features)]
    )
    phi = np.empty(n_features)
    for i in range(n_features):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        phi[i] = float(
            np.sum(weight_by_size[sizes[without]] * (v[without | bit] - v[without]))
        )
    return phi


def shapley_exact(
    model,
    subject: SubjectRecord,
    background: BackgroundSet,
    feature_names: Sequence[str],
) -> AttributionVector:
    """Exact Shapley attribution of score(subject) over the features."""
    v = coalition_values(model, subject, background, feature_names)
    phi = shapley_from_coalition_values(v, len(feature_names))
    return AttributionVector(
        subject_id=subject.id,
        base=float(v[0]),
        phi={name: float(p) for name, p in zip(feature_names, phi)},
        others=0.0,
        displayed=None,
    )


def group_others(av: AttributionVector, displayed: Iterable[str]) -> AttributionVector:
    """Keep phi for displayed features; fold the rest into ``others``.

    Additivity makes this exact: base + sum(phi) + others is unchanged.
    """
    kept = set(displayed)
    unknown = kept - set(av.phi)
    if unknown:
        raise UnknownFeature(sorted(unknown)[0])
    if len(kept) > MAX_DISPLAYED:
        raise ValueError(f"at most {MAX_DISPLAYED} features can be displayed")
    order = tuple(name for name in av.phi if name in kept)
    others = av.others + sum(av.phi[name] for name in av.phi if name not in kept)
    return AttributionVector(
        subject_id=av.subject_id,
        base=av.base,
        phi={name: av.phi[name] for name in order},
        others=others,
        displayed=order,
    )


def importance_from_vectors(
    vectors: Sequence[AttributionVector], feature_names: Sequence[str]
) -> list[tuple[str, float]]:
    """Mean |phi| per feature, sorted descending; ties by name ascending."""
    table = np.array(
        [[av.phi[name] for name in feature_names] for av in vectors]
    )
    importance = np.abs(table).mean(axis=0)
    pairs = list(zip(feature_names, importance.tolist()))
    pairs.sort(key=lambda kv: (-kv[1], kv[0]))
    return pairs


def global_importance(
    model,
    subjects: Sequence[SubjectRecord],
    background: BackgroundSet,
    feature_names: Sequence[str],
) -> list[tuple[str, float]]:
    """Rank features by mean |phi| over the given subjects."""
    if not subjects:
        raise ValueError("subjects must be non-empty")
    vectors = [
        shapley_exact(model, s, background, feature_names) for s in subjects
    ]
    return importance_from_vectors(vectors, feature_names)


def assign_display_ranks(
    schema: Sequence[FeatureSchema],
    importance: Sequence[tuple[str, float]],
    count: int = MAX_DISPLAYED,
) -> list[FeatureSchema]:
    """Give the ``count`` most important features display_rank 1..count."""
    ranked = {name: rank for rank, (name, _) in enumerate(importance[:count], start=1)}
    return [
        replace(f, display_rank=ranked.get(f.name)) for f in schema
    ]


def stacked_segments(
    av: AttributionVector, displayed: Iterable[str] | None = None
) -> list[Segment]:
    """Decompose the outcome into a signed stack of attribution blocks.

    Negative entries stack downward from zero (largest magnitude first),
    then the base value rises from the low point, then positive entries
    stack upward, so the final top edge equals the model outcome.
    Zero-valued entries contribute no block.
    """
    if av.displayed is None:
        if displayed is None:
            raise UngroupedVector()
        av = group_others(av, displayed)

    entries = [(name, av.phi[name]) for name in av.phi]
    entries.append(("others", av.others))
    negatives = sorted(
        ((n, p) for n, p in entries if p < 0), key=lambda kv: (kv[1], kv[0])
    )
    positives = sorted(
        ((n, p) for n, p in entries if p > 0), key=lambda kv: (-kv[1], kv[0])
    )

    segments: list[Segment] = []
    y = 0.0
    for name, p in negatives:
        segments.append(Segment(sign="negative", label=name, y_from=y, y_to=y + p))
        y += p
    segments.append(Segment(sign="base", label="base", y_from=y, y_to=y + av.base))
    y += av.base
    for name, p in positives:
        segments.append(Segment(sign="positive", label=name, y_from=y, y_to=y + p))
        y += p
    return segments


def stack_top(segments: Sequence[Segment]) -> float:
    """y of the stack's upper edge: the reconstructed model outcome."""
    return segments[-1].y_to
