"""Model registry and JSON (de)serialization."""

from __future__ import annotations

import json
from pathlib import Path

from .linear import LinearSvmModel, LogisticRegressionModel, train_linear_svm, train_logreg
from .multilabel import ConstantModel, MultiLabelModel
from .neighbors import KnnModel, train_knn
from .trees import (
    DecisionTreeModel,
    GradientBoostedTreesModel,
    RandomForestModel,
    train_forest,
    train_gbt,
    train_tree,
)

TRAINERS = {
    "logreg": train_logreg,
    "tree": train_tree,
    "linear_svm": train_linear_svm,
    "knn": train_knn,
    "forest": train_forest,
    "gbt": train_gbt,
}

MODEL_CLASSES = {
    "logreg": LogisticRegressionModel,
    "tree": DecisionTreeModel,
    "linear_svm": LinearSvmModel,
    "knn": KnnModel,
    "forest": RandomForestModel,
    "gbt": GradientBoostedTreesModel,
    "constant": ConstantModel,
    "multilabel": MultiLabelModel,
}


def model_from_dict(data: dict) -> object:
    family = data.get("family")
    if family not in MODEL_CLASSES:
        raise ValueError(f"unknown model family {family!r}")
    if int(data.get("version", -1)) != 1:
        raise ValueError(f"unsupported model version {data.get('version')!r}")
    return MODEL_CLASSES[family].from_dict(data)


def save_model(model, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), sort_keys=True), encoding="utf-8")


def load_model(path: str | Path):
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
