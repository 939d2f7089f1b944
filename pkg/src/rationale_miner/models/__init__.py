"""Classifier families used for sentence labelling, implemented from scratch."""

from __future__ import annotations

from ..features import FeatureVector
from .data import (
    LABEL_COLUMNS,
    Dataset,
    DegenerateDataError,
    ParameterError,
    Prediction,
    ShapeError,
    from_dense,
)
from .io import TRAINERS, load_model, model_from_dict, save_model
from .linear import (
    LinearSvmModel,
    LogisticRegressionModel,
    logreg_gradient,
    logreg_loss,
    svm_objective,
    train_linear_svm,
    train_logreg,
)
from .multilabel import ConstantModel, MultiLabelModel, predict_multilabel, train_multilabel
from .neighbors import KnnModel, train_knn
from .trees import (
    DecisionTreeModel,
    GradientBoostedTreesModel,
    RandomForestModel,
    train_forest,
    train_gbt,
    train_tree,
)


def predict_binary(model, x: FeatureVector) -> Prediction:
    """Uniform prediction surface: hard label plus a score in [0, 1]."""
    return Prediction(label=model.predict_label(x), score=float(model.predict_score(x)))


__all__ = [
    "Dataset",
    "FeatureVector",
    "LABEL_COLUMNS",
    "Prediction",
    "DegenerateDataError",
    "ParameterError",
    "ShapeError",
    "from_dense",
    "predict_binary",
    "TRAINERS",
    "save_model",
    "load_model",
    "model_from_dict",
    "train_logreg",
    "train_tree",
    "train_linear_svm",
    "train_knn",
    "train_forest",
    "train_gbt",
    "train_multilabel",
    "predict_multilabel",
    "logreg_loss",
    "logreg_gradient",
    "svm_objective",
    "LogisticRegressionModel",
    "LinearSvmModel",
    "DecisionTreeModel",
    "RandomForestModel",
    "GradientBoostedTreesModel",
    "KnnModel",
    "ConstantModel",
    "MultiLabelModel",
]
