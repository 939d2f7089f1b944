"""Binary-relevance multi-label classification: one binary model per label."""

from __future__ import annotations

from dataclasses import dataclass

from ..annotate import Label
from ..features import FeatureVector
from .data import LABEL_COLUMNS, Dataset, check_dimension


@dataclass
class ConstantModel:
    """Fallback for a constant label column: always emits that constant."""

    label: int
    dimension: int

    def predict_label(self, x: FeatureVector) -> int:
        check_dimension(self.dimension, x)
        return self.label

    def predict_score(self, x: FeatureVector) -> float:
        check_dimension(self.dimension, x)
        return float(self.label)

    def to_dict(self) -> dict:
        return {"family": "constant", "version": 1, "dimension": self.dimension, "label": self.label}

    @classmethod
    def from_dict(cls, data: dict) -> "ConstantModel":
        return cls(label=int(data["label"]), dimension=int(data["dimension"]))


@dataclass
class MultiLabelModel:
    models: dict[Label, object]  # keyed by LABEL_COLUMNS entries
    dimension: int

    def predict_labels(self, x: FeatureVector) -> frozenset[Label]:
        """Labels whose binary model fires; the empty set is a valid outcome."""
        return frozenset(
            label for label in LABEL_COLUMNS if self.models[label].predict_label(x) == 1
        )

    def predict_matrix_row(self, x: FeatureVector) -> tuple[int, int, int]:
        predicted = self.predict_labels(x)
        return tuple(1 if label in predicted else 0 for label in LABEL_COLUMNS)

    def to_dict(self) -> dict:
        return {
            "family": "multilabel",
            "version": 1,
            "dimension": self.dimension,
            "models": {label.value: self.models[label].to_dict() for label in LABEL_COLUMNS},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MultiLabelModel":
        from .io import model_from_dict

        models = {
            label: model_from_dict(data["models"][label.value]) for label in LABEL_COLUMNS
        }
        return cls(models=models, dimension=int(data["dimension"]))


def train_multilabel(
    d: Dataset,
    family: str = "gbt",
    hyper: dict | None = None,
    seed: int = 0,
) -> MultiLabelModel:
    """Train one independent binary model per label column (binary relevance).

    Constant label columns get a ConstantModel instead of a fitted learner.
    Per-label seeds are derived as seed + column index.
    """
    from .io import TRAINERS

    if not d.is_multilabel:
        raise ValueError("train_multilabel needs a multi-label dataset")
    trainer = TRAINERS[family]
    hyper = dict(hyper or {})
    models: dict[Label, object] = {}
    for j, label in enumerate(LABEL_COLUMNS):
        column = d.label_column(label)
        if len(set(column)) == 1:
            models[label] = ConstantModel(label=column[0], dimension=d.dimension)
            continue
        binary = Dataset(X=d.X, y=column)
        if family == "knn":
            models[label] = trainer(binary, **hyper)
        else:
            models[label] = trainer(binary, seed=seed + j, **hyper)
    return MultiLabelModel(models=models, dimension=d.dimension)


def predict_multilabel(m: MultiLabelModel, x: FeatureVector) -> frozenset[Label]:
    return m.predict_labels(x)
