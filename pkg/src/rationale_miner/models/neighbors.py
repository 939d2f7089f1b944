"""k-nearest-neighbors over sparse feature vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..features import FeatureVector
from .data import Dataset, ParameterError, check_dimension


@dataclass
class KnnModel:
    rows: list[FeatureVector]
    labels: list[int]
    k: int
    dimension: int

    def _vote(self, x: FeatureVector) -> int:
        # distance ties break toward the lower row index (stable sort on index)
        sq = x.dot(x)
        scored = []
        for i, row in enumerate(self.rows):
            dist = sq + row.dot(row) - 2.0 * x.dot(row)
            scored.append((dist, i))
        scored.sort()
        return sum(self.labels[i] for _, i in scored[: self.k])

    def predict_label(self, x: FeatureVector) -> int:
        check_dimension(self.dimension, x)
        return 1 if self._vote(x) * 2 > self.k else 0  # vote tie -> label 0

    def predict_score(self, x: FeatureVector) -> float:
        check_dimension(self.dimension, x)
        return self._vote(x) / self.k

    def to_dict(self) -> dict:
        return {
            "family": "knn",
            "version": 1,
            "dimension": self.dimension,
            "k": self.k,
            "labels": list(self.labels),
            "rows": [sorted((col, w) for col, w in r.weights.items()) for r in self.rows],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KnnModel":
        dim = int(data["dimension"])
        rows = [
            FeatureVector({int(col): float(w) for col, w in pairs}, dim)
            for pairs in data["rows"]
        ]
        return cls(rows=rows, labels=[int(v) for v in data["labels"]], k=int(data["k"]), dimension=dim)


def train_knn(d: Dataset, k: int = 5) -> KnnModel:
    if not 1 <= k <= d.n:
        raise ParameterError(f"k={k} out of range for {d.n} training rows")
    d.binary_targets()  # validates 0/1 labels
    return KnnModel(rows=list(d.X), labels=[int(v) for v in d.y], k=k, dimension=d.dimension)


def euclidean_distance(a: FeatureVector, b: FeatureVector) -> float:
    return math.sqrt(max(0.0, a.dot(a) + b.dot(b) - 2.0 * a.dot(b)))
