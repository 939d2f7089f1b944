import math

import numpy as np
import pytest

from rationale_miner.models import (
    Dataset,
    DegenerateDataError,
    LogisticRegressionModel,
    ShapeError,
    from_dense,
    logreg_gradient,
    logreg_loss,
    predict_binary,
    train_linear_svm,
    train_logreg,
)
from rationale_miner.features import FeatureVector


def dataset(rows, y):
    return Dataset(X=from_dense(np.asarray(rows, dtype=float)), y=list(y))


# --- logistic regression ----------------------------------------------------


def test_separable_two_points():
    d = dataset([[0.0, 1.0], [1.0, 0.0]], [0, 1])
    model = train_logreg(d)
    assert [model.predict_label(x) for x in d.X] == [0, 1]
    assert model.final_loss <= model.initial_loss


def test_single_class_rejected():
    with pytest.raises(DegenerateDataError):
        train_logreg(dataset([[0.0], [1.0]], [1, 1]))


def test_duplicate_rows_opposite_labels_score_half():
    d = dataset([[0.3, 0.7], [0.3, 0.7]], [0, 1])
    model = train_logreg(d)
    assert model.predict_score(d.X[0]) == pytest.approx(0.5, abs=1e-6)


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(42)
    X = rng.normal(size=(12, 4))
    y = rng.integers(0, 2, size=12).astype(float)
    w = rng.normal(size=4)
    b = float(rng.normal())
    l2 = 0.7
    grad_w, grad_b = logreg_gradient(w, b, X, y, l2)
    eps = 1e-6
    for j in range(4):
        bump = np.zeros(4)
        bump[j] = eps
        numeric = (logreg_loss(w + bump, b, X, y, l2) - logreg_loss(w - bump, b, X, y, l2)) / (2 * eps)
        assert abs(grad_w[j] - numeric) / max(1e-8, abs(numeric)) < 1e-4
    numeric_b = (logreg_loss(w, b + eps, X, y, l2) - logreg_loss(w, b - eps, X, y, l2)) / (2 * eps)
    assert abs(grad_b - numeric_b) / max(1e-8, abs(numeric_b)) < 1e-4


def test_zero_weight_model_scores_half_on_zero_vector():
    model = LogisticRegressionModel(weights=np.zeros(3), bias=0.0, dimension=3)
    zero = FeatureVector({}, 3)
    assert predict_binary(model, zero).score == pytest.approx(0.5)


def test_dimension_mismatch_raises_shape_error():
    d = dataset([[0.0, 1.0], [1.0, 0.0]], [0, 1])
    model = train_logreg(d)
    with pytest.raises(ShapeError):
        model.predict_score(FeatureVector({0: 1.0}, 5))


def test_serialization_round_trip():
    d = dataset([[0.0, 1.0], [1.0, 0.0], [0.2, 0.9]], [0, 1, 0])
    model = train_logreg(d)
    clone = LogisticRegressionModel.from_dict(model.to_dict())
    for x in d.X:
        assert clone.predict_score(x) == model.predict_score(x)


# --- linear SVM -------------------------------------------------------------


def test_svm_separable_four_points():
    d = dataset([[1.0, 1.0], [2.0, 1.5], [-1.0, -1.0], [-2.0, -1.5]], [1, 1, 0, 0])
    model = train_linear_svm(d)
    assert [model.predict_label(x) for x in d.X] == [1, 1, 0, 0]
    assert 0.0 <= model.predict_score(d.X[0]) <= 1.0


def test_svm_single_class_rejected():
    with pytest.raises(DegenerateDataError):
        train_linear_svm(dataset([[0.0], [1.0]], [0, 0]))


def test_svm_objective_monotone_over_averaged_iterates():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(30, 4))
    y = (X[:, 0] + 0.5 * X[:, 1] > 0).astype(int)
    model = train_linear_svm(Dataset(X=from_dense(X), y=list(y)), epochs=200)
    curve = model.objective_curve
    for window_end in range(19, len(curve), 10):
        assert curve[window_end] <= curve[window_end - 10] + 1e-6


def test_svm_rescaling_preserves_boundary_direction():
    # symmetric +/- pairs keep the bias path at exactly zero, so doubling the
    # inputs while dividing c by 4 (quadrupling lambda) halves the iterates
    rows = np.array([[1.0, 2.0], [2.0, 1.0], [0.5, 1.8], [-1.0, -2.0], [-2.0, -1.0], [-0.5, -1.8]])
    y = [1, 1, 1, 0, 0, 0]
    base = train_linear_svm(Dataset(X=from_dense(rows), y=y), c=1.0, epochs=150)
    scaled = train_linear_svm(Dataset(X=from_dense(rows * 2.0), y=y), c=0.25, epochs=150)
    w1, w2 = base.weights, scaled.weights
    cosine = float(w1 @ w2 / (np.linalg.norm(w1) * np.linalg.norm(w2)))
    assert math.acos(min(1.0, max(-1.0, cosine))) < 1e-3
    assert base.bias == pytest.approx(0.0, abs=1e-12)
