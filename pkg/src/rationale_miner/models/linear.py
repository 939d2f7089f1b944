"""Linear classifiers: logistic regression (full-batch GD) and a linear SVM
trained with Pegasos-style deterministic subgradient steps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..features import FeatureVector
from .data import Dataset, DegenerateDataError, check_dimension


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def logreg_loss(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float) -> float:
    """L2-regularized mean log-loss: mean softplus(margin) - y*margin + l2/(2n) |w|^2."""
    margins = X @ w + b
    n = len(y)
    data_term = float(np.mean(np.logaddexp(0.0, margins) - y * margins))
    return data_term + l2 / (2.0 * n) * float(w @ w)


def logreg_gradient(
    w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float
) -> tuple[np.ndarray, float]:
    n = len(y)
    p = _sigmoid(X @ w + b)
    grad_w = X.T @ (p - y) / n + (l2 / n) * w
    grad_b = float(np.mean(p - y))
    return grad_w, grad_b


def _sparse_margin(weights: np.ndarray, bias: float, x: FeatureVector) -> float:
    return bias + sum(weights[col] * v for col, v in x.weights.items())


@dataclass
class LogisticRegressionModel:
    weights: np.ndarray
    bias: float
    dimension: int
    initial_loss: float = 0.0
    final_loss: float = 0.0

    def predict_score(self, x: FeatureVector) -> float:
        check_dimension(self.dimension, x)
        return float(_sigmoid(_sparse_margin(self.weights, self.bias, x)))

    def predict_label(self, x: FeatureVector) -> int:
        return 1 if self.predict_score(x) >= 0.5 else 0

    def to_dict(self) -> dict:
        return {
            "family": "logreg",
            "version": 1,
            "dimension": self.dimension,
            "weights": self.weights.tolist(),
            "bias": self.bias,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LogisticRegressionModel":
        return cls(
            weights=np.asarray(data["weights"], dtype=float),
            bias=float(data["bias"]),
            dimension=int(data["dimension"]),
        )


def train_logreg(
    d: Dataset,
    l2: float = 1.0,
    epochs: int = 200,
    lr: float = 0.1,
    seed: int = 0,
) -> LogisticRegressionModel:
    """Full-batch gradient descent from zero weights on the regularized log-loss."""
    del seed  # deterministic; kept for a uniform trainer signature
    X = d.dense()
    y = d.binary_targets()
    if y.min() == y.max():
        raise DegenerateDataError("need both classes to fit logistic regression")
    w = np.zeros(d.dimension)
    b = 0.0
    initial = logreg_loss(w, b, X, y, l2)
    for _ in range(epochs):
        grad_w, grad_b = logreg_gradient(w, b, X, y, l2)
        w -= lr * grad_w
        b -= lr * grad_b
    final = logreg_loss(w, b, X, y, l2)
    return LogisticRegressionModel(
        weights=w, bias=b, dimension=d.dimension, initial_loss=initial, final_loss=final
    )


@dataclass
class LinearSvmModel:
    weights: np.ndarray
    bias: float
    dimension: int
    objective_curve: list[float] = field(default_factory=list)  # J(averaged iterate)/epoch

    def margin(self, x: FeatureVector) -> float:
        check_dimension(self.dimension, x)
        return _sparse_margin(self.weights, self.bias, x)

    def predict_label(self, x: FeatureVector) -> int:
        return 1 if self.margin(x) > 0 else 0

    def predict_score(self, x: FeatureVector) -> float:
        # squashed margin; uncalibrated but monotone in the decision value
        return float(1.0 / (1.0 + math.exp(-self.margin(x))))

    def to_dict(self) -> dict:
        return {
            "family": "linear_svm",
            "version": 1,
            "dimension": self.dimension,
            "weights": self.weights.tolist(),
            "bias": self.bias,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinearSvmModel":
        return cls(
            weights=np.asarray(data["weights"], dtype=float),
            bias=float(data["bias"]),
            dimension=int(data["dimension"]),
        )


def svm_objective(w: np.ndarray, b: float, X: np.ndarray, y_pm: np.ndarray, lam: float) -> float:
    """lam/2 |w|^2 + mean hinge loss."""
    margins = y_pm * (X @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins)
    return 0.5 * lam * float(w @ w) + float(hinge.mean())


def train_linear_svm(
    d: Dataset,
    c: float = 1.0,
    epochs: int = 200,
    seed: int = 0,
) -> LinearSvmModel:
    """Deterministic full-batch subgradient descent with step 1/(lam*t).

    lam = 1/(c*n).  The returned model uses the averaged iterate, whose
    objective settles monotonically; the per-epoch objective of the average
    is recorded in objective_curve.
    """
    del seed
    X = d.dense()
    y = d.binary_targets()
    if y.min() == y.max():
        raise DegenerateDataError("need both classes to fit an SVM")
    y_pm = 2.0 * y - 1.0
    n = d.n
    lam = 1.0 / (c * n)
    w = np.zeros(d.dimension)
    b = 0.0
    w_sum = np.zeros(d.dimension)
    b_sum = 0.0
    curve = []
    for t in range(1, epochs + 1):
        eta = 1.0 / (lam * t)
        margins = y_pm * (X @ w + b)
        violating = margins < 1.0
        if violating.any():
            grad_w = lam * w - (y_pm[violating, None] * X[violating]).sum(axis=0) / n
            grad_b = -float(y_pm[violating].sum()) / n
        else:
            grad_w = lam * w
            grad_b = 0.0
        w = w - eta * grad_w
        b = b - eta * grad_b
        w_sum += w
        b_sum += b
        curve.append(svm_objective(w_sum / t, b_sum / t, X, y_pm, lam))
    model = LinearSvmModel(
        weights=w_sum / epochs, bias=b_sum / epochs, dimension=d.dimension
    )
    model.objective_curve = curve
    return model
