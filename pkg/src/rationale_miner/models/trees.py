"""Tree learners: CART classifier, bagged forest, second-order boosted trees.

All split searches enumerate (feature, midpoint-between-distinct-values)
candidates.  Tie-breaks are deterministic: lowest feature index first, then
lowest threshold (scan order plus strict improvement).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..features import FeatureVector
from .data import Dataset, DegenerateDataError, check_dimension


@dataclass
class TreeNode:
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    prediction: int = 0
    value: float = 0.0  # positive share (classifier) or leaf weight (regression)

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


def _walk(nodes: list[TreeNode], x: FeatureVector) -> TreeNode:
    node = nodes[0]
    while not node.is_leaf:
        if x.get(node.feature) <= node.threshold:
            node = nodes[node.left]
        else:
            node = nodes[node.right]
    return node


def _gini(pos: float, n: float) -> float:
    if n == 0:
        return 0.0
    p = pos / n
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _best_gini_split(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    features: np.ndarray,
    min_leaf: int,
) -> tuple[int, float, float] | None:
    """Return (feature, threshold, gain) maximizing Gini-impurity decrease."""
    n = rows.size
    ysub = y[rows]
    pos_total = float(ysub.sum())
    parent = _gini(pos_total, n)
    best: tuple[int, float, float] | None = None
    best_gain = 0.0
    for f in features:
        xs = X[rows, f]
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        cum_pos = np.cumsum(ysub[order])
        cuts = np.nonzero(xs_sorted[1:] > xs_sorted[:-1])[0] + 1
        if min_leaf > 1:
            cuts = cuts[(cuts >= min_leaf) & (n - cuts >= min_leaf)]
        if cuts.size == 0:
            continue
        n_left = cuts.astype(float)
        n_right = n - n_left
        pos_left = cum_pos[cuts - 1].astype(float)
        pos_right = pos_total - pos_left
        p_l = pos_left / n_left
        p_r = pos_right / n_right
        gini_l = 1.0 - p_l * p_l - (1.0 - p_l) * (1.0 - p_l)
        gini_r = 1.0 - p_r * p_r - (1.0 - p_r) * (1.0 - p_r)
        gains = parent - (n_left / n) * gini_l - (n_right / n) * gini_r
        j = int(np.argmax(gains))  # first max -> lowest threshold
        if gains[j] > best_gain:
            best_gain = float(gains[j])
            threshold = float((xs_sorted[cuts[j] - 1] + xs_sorted[cuts[j]]) / 2.0)
            best = (int(f), threshold, best_gain)
    return best


@dataclass
class DecisionTreeModel:
    nodes: list[TreeNode]
    dimension: int

    def predict_label(self, x: FeatureVector) -> int:
        check_dimension(self.dimension, x)
        return _walk(self.nodes, x).prediction

    def predict_score(self, x: FeatureVector) -> float:
        check_dimension(self.dimension, x)
        return _walk(self.nodes, x).value

    def to_dict(self) -> dict:
        return {
            "family": "tree",
            "version": 1,
            "dimension": self.dimension,
            "nodes": [
                [n.feature, n.threshold, n.left, n.right, n.prediction, n.value]
                for n in self.nodes
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionTreeModel":
        nodes = [TreeNode(int(f), t, int(l), int(r), int(p), v) for f, t, l, r, p, v in data["nodes"]]
        return cls(nodes, int(data["dimension"]))


def _grow_classification_tree(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    max_depth: int | None,
    min_leaf: int,
    feature_picker: Callable[[], np.ndarray],
) -> list[TreeNode]:
    nodes: list[TreeNode] = []

    def leaf(sub_rows: np.ndarray) -> int:
        pos = float(y[sub_rows].sum())
        n = sub_rows.size
        nodes.append(
            TreeNode(prediction=1 if pos * 2 > n else 0, value=pos / n if n else 0.0)
        )
        return len(nodes) - 1

    def grow(sub_rows: np.ndarray, depth: int) -> int:
        ysub = y[sub_rows]
        if (
            sub_rows.size < 2 * min_leaf
            or ysub.min() == ysub.max()
            or (max_depth is not None and depth >= max_depth)
        ):
            return leaf(sub_rows)
        split = _best_gini_split(X, y, sub_rows, feature_picker(), min_leaf)
        if split is None:
            return leaf(sub_rows)
        f, threshold, _ = split
        mask = X[sub_rows, f] <= threshold
        index = len(nodes)
        nodes.append(TreeNode(feature=f, threshold=threshold))
        nodes[index].left = grow(sub_rows[mask], depth + 1)
        nodes[index].right = grow(sub_rows[~mask], depth + 1)
        pos = float(ysub.sum())
        nodes[index].prediction = 1 if pos * 2 > sub_rows.size else 0
        nodes[index].value = pos / sub_rows.size
        return index

    grow(rows, 0)
    return nodes


def train_tree(
    d: Dataset,
    max_depth: int | None = None,
    min_leaf: int = 1,
    seed: int = 0,
) -> DecisionTreeModel:
    """CART with Gini impurity; grows until pure, depth limit, or min_leaf."""
    del seed  # training is deterministic; kept for a uniform trainer signature
    X = d.dense()
    y = d.binary_targets()
    all_features = np.arange(d.dimension)
    nodes = _grow_classification_tree(
        X, y, np.arange(d.n), max_depth, min_leaf, lambda: all_features
    )
    return DecisionTreeModel(nodes, d.dimension)


@dataclass
class RandomForestModel:
    trees: list[DecisionTreeModel]
    dimension: int

    def _votes(self, x: FeatureVector) -> int:
        return sum(t.predict_label(x) for t in self.trees)

    def predict_label(self, x: FeatureVector) -> int:
        check_dimension(self.dimension, x)
        return 1 if self._votes(x) * 2 > len(self.trees) else 0

    def predict_score(self, x: FeatureVector) -> float:
        check_dimension(self.dimension, x)
        return self._votes(x) / len(self.trees)

    def to_dict(self) -> dict:
        return {
            "family": "forest",
            "version": 1,
            "dimension": self.dimension,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RandomForestModel":
        return cls([DecisionTreeModel.from_dict(t) for t in data["trees"]], int(data["dimension"]))


def train_forest(
    d: Dataset,
    n_trees: int = 100,
    max_features: int | str | None = "sqrt",
    max_depth: int | None = None,
    min_leaf: int = 1,
    seed: int = 0,
    bootstrap: bool = True,
) -> RandomForestModel:
    """Bagged CART trees with a random feature subset drawn per split.

    Per-tree randomness is seeded as seed + tree index, so trees can be
    reproduced independently of training order.
    """
    X = d.dense()
    y = d.binary_targets()
    if max_features == "sqrt" or max_features is None:
        m = max(1, int(math.sqrt(d.dimension)))
    else:
        m = min(int(max_features), d.dimension)
    all_features = np.arange(d.dimension)
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng(seed + t)
        rows = rng.integers(0, d.n, size=d.n) if bootstrap else np.arange(d.n)
        if m >= d.dimension:
            picker = lambda: all_features  # noqa: E731
        else:
            picker = lambda rng=rng: np.sort(rng.choice(d.dimension, size=m, replace=False))
        nodes = _grow_classification_tree(X, y, rows, max_depth, min_leaf, picker)
        trees.append(DecisionTreeModel(nodes, d.dimension))
    return RandomForestModel(trees, d.dimension)


# --- gradient boosting ------------------------------------------------------


def _best_boost_split(
    X: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    rows: np.ndarray,
    lam: float,
) -> tuple[int, float, float] | None:
    """Second-order gain: 1/2 [GL^2/(HL+lam) + GR^2/(HR+lam) - G^2/(H+lam)]."""
    n = rows.size
    g_total = float(g[rows].sum())
    h_total = float(h[rows].sum())
    parent_term = g_total * g_total / (h_total + lam)
    best: tuple[int, float, float] | None = None
    best_gain = 0.0
    for f in range(X.shape[1]):
        xs = X[rows, f]
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        cum_g = np.cumsum(g[rows][order])
        cum_h = np.cumsum(h[rows][order])
        cuts = np.nonzero(xs_sorted[1:] > xs_sorted[:-1])[0] + 1
        if cuts.size == 0:
            continue
        g_left = cum_g[cuts - 1]
        h_left = cum_h[cuts - 1]
        g_right = g_total - g_left
        h_right = h_total - h_left
        gains = 0.5 * (
            g_left * g_left / (h_left + lam)
            + g_right * g_right / (h_right + lam)
            - parent_term
        )
        j = int(np.argmax(gains))
        if gains[j] > best_gain:
            best_gain = float(gains[j])
            threshold = float((xs_sorted[cuts[j] - 1] + xs_sorted[cuts[j]]) / 2.0)
            best = (int(f), threshold, best_gain)
    return best


def _grow_regression_tree(
    X: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    max_depth: int,
    lam: float,
) -> list[TreeNode]:
    nodes: list[TreeNode] = []

    def leaf(rows: np.ndarray) -> int:
        value = -float(g[rows].sum()) / (float(h[rows].sum()) + lam)
        nodes.append(TreeNode(value=value))
        return len(nodes) - 1

    def grow(rows: np.ndarray, depth: int) -> int:
        if rows.size < 2 or depth >= max_depth:
            return leaf(rows)
        split = _best_boost_split(X, g, h, rows, lam)
        if split is None:
            return leaf(rows)
        f, threshold, _ = split
        mask = X[rows, f] <= threshold
        index = len(nodes)
        nodes.append(TreeNode(feature=f, threshold=threshold))
        nodes[index].left = grow(rows[mask], depth + 1)
        nodes[index].right = grow(rows[~mask], depth + 1)
        return index

    grow(np.arange(X.shape[0]), 0)
    return nodes


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def _log_loss(y: np.ndarray, p: np.ndarray) -> float:
    eps = 1e-12
    p = np.clip(p, eps, 1 - eps)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


@dataclass
class GradientBoostedTreesModel:
    base_rate: float
    learning_rate: float
    lam: float
    trees: list[list[TreeNode]]
    dimension: int
    loss_curve: list[float] = field(default_factory=list)  # training loss per round

    @property
    def base_logit(self) -> float:
        return math.log(self.base_rate / (1.0 - self.base_rate))

    def predict_score(self, x: FeatureVector) -> float:
        check_dimension(self.dimension, x)
        if not self.trees:
            # with zero rounds the prediction is the positive-class prior, exactly
            return self.base_rate
        margin = self.base_logit
        for nodes in self.trees:
            margin += self.learning_rate * _walk(nodes, x).value
        return float(_sigmoid(margin))

    def predict_label(self, x: FeatureVector) -> int:
        return 1 if self.predict_score(x) >= 0.5 else 0

    def to_dict(self) -> dict:
        return {
            "family": "gbt",
            "version": 1,
            "dimension": self.dimension,
            "base_rate": self.base_rate,
            "learning_rate": self.learning_rate,
            "lambda": self.lam,
            "trees": [
                [[n.feature, n.threshold, n.left, n.right, n.prediction, n.value] for n in nodes]
                for nodes in self.trees
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GradientBoostedTreesModel":
        trees = [
            [TreeNode(int(f), t, int(l), int(r), int(p), v) for f, t, l, r, p, v in nodes]
            for nodes in data["trees"]
        ]
        return cls(
            base_rate=float(data["base_rate"]),
            learning_rate=float(data["learning_rate"]),
            lam=float(data["lambda"]),
            trees=trees,
            dimension=int(data["dimension"]),
        )


def train_gbt(
    d: Dataset,
    n_rounds: int = 100,
    lr: float = 0.3,
    max_depth: int = 6,
    lam: float = 1.0,
    seed: int = 0,
) -> GradientBoostedTreesModel:
    """Boosted regression trees on logistic loss.

    Each round fits a depth-limited tree to g_i = p_i - y_i, h_i = p_i(1-p_i)
    with leaf value -sum(g)/(sum(h)+lambda); the model margin starts at the
    log-odds of the positive rate.
    """
    del seed  # deterministic; kept for a uniform trainer signature
    X = d.dense()
    y = d.binary_targets()
    rate = float(y.mean())
    if rate == 0.0 or rate == 1.0:
        raise DegenerateDataError("need both classes to fit boosted trees")
    model = GradientBoostedTreesModel(
        base_rate=rate, learning_rate=lr, lam=lam, trees=[], dimension=d.dimension
    )
    margins = np.full(d.n, model.base_logit)
    model.loss_curve.append(_log_loss(y, np.full(d.n, rate)))
    for _ in range(n_rounds):
        p = _sigmoid(margins)
        g = p - y
        h = p * (1.0 - p)
        nodes = _grow_regression_tree(X, g, h, max_depth, lam)
        model.trees.append(nodes)
        leaf_values = np.empty(d.n)
        for i in range(d.n):
            node = nodes[0]
            while not node.is_leaf:
                node = nodes[node.left] if X[i, node.feature] <= node.threshold else nodes[node.right]
            leaf_values[i] = node.value
        margins = margins + lr * leaf_values
        model.loss_curve.append(_log_loss(y, _sigmoid(margins)))
    return model
