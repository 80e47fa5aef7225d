"""Probability scorers: a generic interface and an in-repo logistic model.

The logistic model works on normalized features internally, so weight
magnitudes are comparable across features regardless of raw units. Scores
are strictly inside (0, 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Protocol, Sequence, runtime_checkable

import numpy as np

from .dataset import FeatureSchema, SubjectRecord
from .errors import NoLabels, SchemaMismatch, SingleClassData
from .serialize import fmt17

BIAS_KEY = "__bias__"


@runtime_checkable
class Scorer(Protocol):
    """Anything that maps a raw feature map to a probability."""

    def score(self, values: Mapping[str, float]) -> float: ...


def sigmoid(z: np.ndarray | float) -> np.ndarray | float:
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 2000
    l2_lambda: float = 1e-3
    seed: int = 42


@dataclass
class LogisticModel:
    """score(x) = sigmoid(bias + sum_f w_f * normalized_f(x))."""

    weights: dict[str, float]
    bias: float
    schema: Sequence[FeatureSchema]
    loss_history: tuple[float, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        schema_names = [f.name for f in self.schema]
        if set(self.weights) != set(schema_names):
            raise SchemaMismatch("weights must cover exactly the schema features")
        self.feature_order: tuple[str, ...] = tuple(schema_names)
        self._w = np.array([self.weights[name] for name in self.feature_order])
        self._mins = np.array([f.min for f in self.schema])
        self._spans = np.array([f.span for f in self.schema])

    def score(self, values: Mapping[str, float]) -> float:
        if set(values) != set(self.feature_order):
            raise SchemaMismatch("feature names differ from schema")
        row = np.array([values[name] for name in self.feature_order])
        return float(self.score_rows(self.feature_order, row[None, :])[0])

    def score_rows(self, feature_names: Sequence[str], raw: np.ndarray) -> np.ndarray:
        """Vectorized scoring of raw-value rows ordered by ``feature_names``."""
        if tuple(feature_names) != self.feature_order:
            raise SchemaMismatch("feature order differs from schema")
        norm = (np.asarray(raw, dtype=float) - self._mins) / self._spans
        return sigmoid(norm @ self._w + self.bias)


def score(model: Scorer, record: SubjectRecord) -> float:
    return model.score(record.values)


def score_batch(model: Scorer, records: Sequence[SubjectRecord]) -> list[float]:
    return [model.score(r.values) for r in records]


def penalized_log_loss(
    X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2_lambda: float
) -> float:
    """Mean cross-entropy plus (l2/2)*|w|^2, computed in log-space for stability."""
    z = X @ w + b
    ce = np.mean(y * np.logaddexp(0.0, -z) + (1.0 - y) * np.logaddexp(0.0, z))
    return float(ce + 0.5 * l2_lambda * float(w @ w))


def penalized_log_loss_grad(
    X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2_lambda: float
) -> tuple[np.ndarray, float]:
    p = sigmoid(X @ w + b)
    residual = p - y
    grad_w = X.T @ residual / len(y) + l2_lambda * w
    grad_b = float(np.mean(residual))
    return grad_w, grad_b


def train_logistic(
    records: Sequence[SubjectRecord],
    schema: Sequence[FeatureSchema],
    config: TrainConfig | None = None,
) -> LogisticModel:
    """Full-batch gradient descent from zero weights; deterministic.

    The returned model carries ``loss_history`` with one entry per epoch
    plus the loss at initialization.
    """
    cfg = config or TrainConfig()
    if any(r.label is None for r in records):
        raise NoLabels()
    y = np.array([r.label for r in records], dtype=float)
    if len(np.unique(y)) < 2:
        raise SingleClassData()

    names = [f.name for f in schema]
    mins = np.array([f.min for f in schema])
    spans = np.array([f.span for f in schema])
    raw = np.array([[r.values[name] for name in names] for r in records])
    X = (raw - mins) / spans

    w = np.zeros(len(names))
    b = 0.0
    history = [penalized_log_loss(X, y, w, b, cfg.l2_lambda)]
    for _ in range(cfg.epochs):
        grad_w, grad_b = penalized_log_loss_grad(X, y, w, b, cfg.l2_lambda)
        w = w - cfg.learning_rate * grad_w
        b = b - cfg.learning_rate * grad_b
        history.append(penalized_log_loss(X, y, w, b, cfg.l2_lambda))

    return LogisticModel(
        weights={name: float(wi) for name, wi in zip(names, w)},
        bias=float(b),
        schema=list(schema),
        loss_history=tuple(history),
    )


def save_model(model: LogisticModel, path) -> None:
    """Flat text persistence: one 'name<TAB>weight' line per feature plus bias."""
    with open(path, "w", encoding="utf-8") as fh:
        for name in model.feature_order:
            fh.write(f"{name}\t{fmt17(model.weights[name])}\n")
        fh.write(f"{BIAS_KEY}\t{fmt17(model.bias)}\n")


def load_model(path, schema: Sequence[FeatureSchema]) -> LogisticModel:
    weights: dict[str, float] = {}
    bias: float | None = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            name, _, cell = line.partition("\t")
            if not cell:
                raise SchemaMismatch(f"malformed model line {line!r}")
            value = float(cell)
            if name == BIAS_KEY:
                bias = value
            else:
                weights[name] = value
    if bias is None:
        raise SchemaMismatch("model file has no bias line")
    return LogisticModel(weights=weights, bias=bias, schema=list(schema))
