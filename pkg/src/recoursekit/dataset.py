"""Tabular subject data: CSV ingestion, feature schema, normalization.

A loaded dataset is immutable. Feature min/max/mean come from the data
itself, so every loaded value normalizes into [0, 1]. Values supplied
later through an API boundary go through :func:`clamp_values` first.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ConstantColumn,
    DatasetError,
    DuplicateId,
    MissingIdColumn,
    NonNumericCell,
    OutOfRange,
)

ID_COLUMN = "id"
LABEL_COLUMN = "label"

ROUND_TRIP_TOL = 1e-12


@dataclass(frozen=True)
class FeatureSchema:
    """Per-feature metadata in raw units."""

    name: str
    min: float
    max: float
    mean: float
    mutable: bool = True
    display_rank: int | None = None

    @property
    def span(self) -> float:
        return self.max - self.min


@dataclass(frozen=True)
class SubjectRecord:
    """One data subject: raw feature values plus an optional binary label."""

    id: str
    values: Mapping[str, float]
    label: int | None = None


@dataclass(frozen=True)
class NormalizedVector:
    """Feature map rescaled so every entry lies in [0, 1]."""

    values: Mapping[str, float]


def load_csv(path) -> tuple[list[FeatureSchema], list[SubjectRecord]]:
    """Parse a subject CSV into (schema, records).

    The file must have a header row with an ``id`` column; a ``label``
    column with values in {0, 1} is optional; every other column is a
    numeric feature. Row order is preserved.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError("CSV is empty") from None
        header = [h.strip() for h in header]
        if ID_COLUMN not in header:
            raise MissingIdColumn()
        id_idx = header.index(ID_COLUMN)
        label_idx = header.index(LABEL_COLUMN) if LABEL_COLUMN in header else None
        feature_names = [
            h for i, h in enumerate(header) if i != id_idx and i != label_idx
        ]
        feature_idx = [
            i for i in range(len(header)) if i != id_idx and i != label_idx
        ]

        records: list[SubjectRecord] = []
        seen_ids: set[str] = set()
        columns: list[list[float]] = [[] for _ in feature_names]
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            subject_id = row[id_idx].strip()
            if subject_id in seen_ids:
                raise DuplicateId(subject_id)
            seen_ids.add(subject_id)

            label: int | None = None
            if label_idx is not None:
                cell = row[label_idx].strip()
                try:
                    raw_label = float(cell)
                except ValueError:
                    raise NonNumericCell(line_no, LABEL_COLUMN) from None
                if raw_label not in (0.0, 1.0):
                    raise NonNumericCell(line_no, LABEL_COLUMN)
                label = int(raw_label)

            values: dict[str, float] = {}
            for name, col in zip(feature_names, feature_idx):
                cell = row[col].strip()
                try:
                    value = float(cell)
                except ValueError:
                    raise NonNumericCell(line_no, name) from None
                if not np.isfinite(value):
                    raise NonNumericCell(line_no, name)
                values[name] = value
            for store, name in zip(columns, feature_names):
                store.append(values[name])
            records.append(SubjectRecord(id=subject_id, values=values, label=label))

    if not records:
        raise DatasetError("CSV has no data rows")

    schema: list[FeatureSchema] = []
    for name, col in zip(feature_names, columns):
        arr = np.asarray(col, dtype=float)
        vmin = float(arr.min())
        vmax = float(arr.max())
        if vmin == vmax:
            raise ConstantColumn(name)
        schema.append(
            FeatureSchema(name=name, min=vmin, max=vmax, mean=float(arr.mean()))
        )
    return schema, records


def normalize(record: SubjectRecord, schema: Sequence[FeatureSchema]) -> NormalizedVector:
    """Map each raw value through (v - min) / (max - min)."""
    values = {
        f.name: (record.values[f.name] - f.min) / f.span for f in schema
    }
    return NormalizedVector(values=values)


def denormalize(nv: NormalizedVector, schema: Sequence[FeatureSchema]) -> dict[str, float]:
    """Inverse of :func:`normalize`; rejects entries outside [0, 1]."""
    out: dict[str, float] = {}
    for f in schema:
        v = nv.values[f.name]
        if v < -ROUND_TRIP_TOL or v > 1.0 + ROUND_TRIP_TOL:
            raise OutOfRange(f.name)
        out[f.name] = f.min + v * f.span
    return out


def dataset_mean_normalized(schema: Sequence[FeatureSchema]) -> NormalizedVector:
    """Normalized position of the dataset mean for every feature."""
    return NormalizedVector(
        values={f.name: (f.mean - f.min) / f.span for f in schema}
    )


def clamp_values(
    values: Mapping[str, float], schema: Sequence[FeatureSchema]
) -> tuple[dict[str, float], bool]:
    """Clamp raw values into each feature's [min, max]; flags whether any moved."""
    clamped = False
    out: dict[str, float] = {}
    for f in schema:
        v = values[f.name]
        c = min(max(v, f.min), f.max)
        if c != v:
            clamped = True
        out[f.name] = c
    return out, clamped


def mark_immutable(
    schema: Sequence[FeatureSchema], names: Iterable[str]
) -> list[FeatureSchema]:
    """Return a schema copy with ``mutable=False`` on the given features."""
    frozen = set(names)
    unknown = frozen - {f.name for f in schema}
    if unknown:
        raise DatasetError(f"unknown features: {sorted(unknown)}")
    return [
        replace(f, mutable=False) if f.name in frozen else f for f in schema
    ]


class Dataset:
    """Immutable bundle of schema and records with numpy views.

    ``raw`` and ``norm`` are (n_subjects, n_features) matrices in schema
    column order; ``norm`` entries are all in [0, 1] by construction.
    """

    def __init__(self, schema: Sequence[FeatureSchema], records: Sequence[SubjectRecord]):
        self.schema: list[FeatureSchema] = list(schema)
        self.records: list[SubjectRecord] = list(records)
        self.feature_names: list[str] = [f.name for f in self.schema]
        self.ids: list[str] = [r.id for r in self.records]
        self.index_of: dict[str, int] = {r.id: i for i, r in enumerate(self.records)}
        self.raw = np.array(
            [[r.values[name] for name in self.feature_names] for r in self.records],
            dtype=float,
        )
        self._mins = np.array([f.min for f in self.schema])
        self._spans = np.array([f.span for f in self.schema])
        self.norm = (self.raw - self._mins) / self._spans

    @classmethod
    def load(cls, path) -> "Dataset":
        return cls(*load_csv(path))

    def __len__(self) -> int:
        return len(self.records)

    def record(self, subject_id: str) -> SubjectRecord:
        return self.records[self.index_of[subject_id]]

    def normalize_row(self, values: Mapping[str, float]) -> np.ndarray:
        row = np.array([values[name] for name in self.feature_names])
        return (row - self._mins) / self._spans

    def normalized_mean(self) -> NormalizedVector:
        return dataset_mean_normalized(self.schema)

    @property
    def mean_norm(self) -> np.ndarray:
        return np.array(
            [(f.mean - f.min) / f.span for f in self.schema]
        )

    def with_schema(self, schema: Sequence[FeatureSchema]) -> "Dataset":
        """Copy with replaced schema metadata (same features, same order)."""
        if [f.name for f in schema] != self.feature_names:
            raise DatasetError("replacement schema must keep feature names and order")
        return Dataset(schema, self.records)
