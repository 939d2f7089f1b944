"""Shared dataset container and error types for the classifier families."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..annotate import CLASSIFICATION_LABELS, Label
from ..features import FeatureVector

LABEL_COLUMNS = CLASSIFICATION_LABELS  # (Decision, Rationale, SupportingFact)


class DegenerateDataError(ValueError):
    """Training data contains a single class where two are required."""


class ShapeError(ValueError):
    pass


class ParameterError(ValueError):
    pass


@dataclass
class Dataset:
    """Feature rows plus either binary/class labels y or a multi-label matrix Y.

    Y rows are 0/1 triples over LABEL_COLUMNS order.
    """

    X: list[FeatureVector]
    y: list | None = None
    Y: list[tuple[int, int, int]] | None = None

    def __post_init__(self):
        if (self.y is None) == (self.Y is None):
            raise ValueError("exactly one of y / Y must be given")
        n_labels = len(self.y) if self.y is not None else len(self.Y)
        if len(self.X) != n_labels:
            raise ShapeError(f"{len(self.X)} rows but {n_labels} labels")
        if self.Y is not None:
            for row in self.Y:
                if len(row) != len(LABEL_COLUMNS) or any(v not in (0, 1) for v in row):
                    raise ValueError(f"bad multi-label row {row!r}")
        if self.X:
            dims = {x.dimension for x in self.X}
            if len(dims) != 1:
                raise ShapeError(f"mixed feature dimensions: {sorted(dims)}")

    @property
    def n(self) -> int:
        return len(self.X)

    @property
    def dimension(self) -> int:
        return self.X[0].dimension if self.X else 0

    @property
    def is_multilabel(self) -> bool:
        return self.Y is not None

    def dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.dimension))
        for i, x in enumerate(self.X):
            for col, w in x.weights.items():
                out[i, col] = w
        return out

    def binary_targets(self) -> np.ndarray:
        if self.y is None:
            raise ValueError("not a single-label dataset")
        values = set(self.y)
        if not values <= {0, 1}:
            raise ValueError(f"binary labels must be 0/1, got {sorted(values, key=repr)}")
        return np.asarray(self.y, dtype=float)

    def label_column(self, label: Label) -> list[int]:
        if self.Y is None:
            raise ValueError("not a multi-label dataset")
        j = LABEL_COLUMNS.index(label)
        return [row[j] for row in self.Y]

    def subset(self, indices: Sequence[int]) -> "Dataset":
        X = [self.X[i] for i in indices]
        if self.y is not None:
            return Dataset(X=X, y=[self.y[i] for i in indices])
        return Dataset(X=X, Y=[self.Y[i] for i in indices])


@dataclass(frozen=True)
class Prediction:
    label: int
    score: float  # always in [0, 1]


def from_dense(matrix: np.ndarray) -> list[FeatureVector]:
    """Convenience for tests and synthetic data: dense rows -> FeatureVectors."""
    matrix = np.asarray(matrix, dtype=float)
    dim = matrix.shape[1]
    rows = []
    for r in matrix:
        rows.append(FeatureVector({int(j): float(v) for j, v in enumerate(r) if v != 0.0}, dim))
    return rows


def check_dimension(model_dim: int, x: FeatureVector) -> None:
    if x.dimension != model_dim:
        raise ShapeError(f"feature dimension {x.dimension} != model dimension {model_dim}")
