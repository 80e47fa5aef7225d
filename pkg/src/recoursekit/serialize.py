"""Bit-stable serialization: 17-significant-digit decimals everywhere.

Floats are written with ``%.17g`` so parsing the text reproduces the exact
binary value; repeated serialization of the same objects yields identical
bytes. The JSON writer is deliberately hand-rolled because the stdlib
encoder does not let callers control float formatting.
"""

from __future__ import annotations

import csv
import json
import math
from typing import IO, TYPE_CHECKING, Any, Mapping, Sequence

if TYPE_CHECKING:  # pragma: no cover - import cycle guard
    from .attribution import AttributionVector
    from .dataset import FeatureSchema
    from .recourse import RecoursePath


def fmt17(x: float) -> str:
    """Decimal form of a float with 17 significant digits (exact round trip)."""
    return format(float(x), ".17g")


def dumps(value: Any) -> str:
    """Serialize to JSON with deterministic bytes and fmt17 numbers."""
    out: list[str] = []
    _emit(value, out)
    return "".join(out)


def _emit(value: Any, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite number in wire document")
        out.append(fmt17(value))
    elif isinstance(value, Mapping):
        out.append("{")
        first = True
        for key, item in value.items():
            if not isinstance(key, str):
                raise TypeError(f"JSON keys must be strings, got {type(key).__name__}")
            if not first:
                out.append(",")
            first = False
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _emit(item, out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        # numpy scalars and similar duck-typed numbers
        item = getattr(value, "item", None)
        if callable(item):
            _emit(item(), out)
        else:
            raise TypeError(f"cannot serialize {type(value).__name__}")


# -- attribution table CSV ---------------------------------------------------

def write_attribution_csv(
    vectors: Sequence["AttributionVector"],
    feature_names: Sequence[str],
    fh: IO[str],
) -> None:
    """One row per subject: subject_id, base, per-feature phi, others."""
    writer = csv.writer(fh)
    writer.writerow(["subject_id", "base", *feature_names, "others"])
    for av in vectors:
        writer.writerow(
            [
                av.subject_id,
                fmt17(av.base),
                *[fmt17(av.phi.get(name, 0.0)) for name in feature_names],
                fmt17(av.others),
            ]
        )


def read_attribution_csv(fh: IO[str]):
    """Parse the table written by :func:`write_attribution_csv`.

    Returns (feature_names, rows) where each row is a dict with
    subject_id, base, phi map, and others.
    """
    reader = csv.reader(fh)
    header = next(reader)
    if header[:2] != ["subject_id", "base"] or header[-1] != "others":
        raise ValueError("not an attribution table")
    feature_names = header[2:-1]
    rows = []
    for row in reader:
        rows.append(
            {
                "subject_id": row[0],
                "base": float(row[1]),
                "phi": {name: float(cell) for name, cell in zip(feature_names, row[2:-1])},
                "others": float(row[-1]),
            }
        )
    return feature_names, rows


# -- path export CSV ---------------------------------------------------------

def write_path_csv(
    path: "RecoursePath",
    schema: Sequence["FeatureSchema"],
    fh: IO[str],
) -> None:
    """One row per visited state, including per-step projection metadata."""
    names = [f.name for f in schema]
    writer = csv.writer(fh)
    writer.writerow(
        [
            "step",
            "subject_id",
            "outcome",
            "projection",
            "l1_change",
            "outcome_gain",
            "base",
            *[f"phi_{name}" for name in names],
            "others",
            *[f"dev_{name}" for name in names],
        ]
    )
    for i, state in enumerate(path.states):
        av = state.attribution
        writer.writerow(
            [
                i,
                state.subject_id,
                fmt17(state.outcome),
                "" if state.step_projection is None else fmt17(state.step_projection),
                "" if state.step_l1_change is None else fmt17(state.step_l1_change),
                "" if state.step_outcome_gain is None else fmt17(state.step_outcome_gain),
                fmt17(av.base),
                *[fmt17(av.phi[name]) if name in av.phi else "" for name in names],
                fmt17(av.others),
                *[fmt17(state.deviation[name]) for name in names],
            ]
        )
