"""Evaluation protocol: under-sampling, k-fold CV, 60/30 split, micro metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .models.data import LABEL_COLUMNS, Dataset, ParameterError, ShapeError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass
class MetricReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    counts: ConfusionCounts | None = None
    per_label: dict[str, "MetricReport"] = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }
        if self.per_label:
            out["per_label"] = {k: v.as_dict() for k, v in self.per_label.items()}
        return out


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def _report_from_counts(c: ConfusionCounts) -> MetricReport:
    precision = _safe_div(c.tp, c.tp + c.fp)
    recall = _safe_div(c.tp, c.tp + c.fn)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    return MetricReport(
        accuracy=_safe_div(c.tp + c.tn, c.total),
        precision=precision,
        recall=recall,
        f1=f1,
        counts=c,
    )


def binary_metrics(y_true: Sequence[int], y_pred: Sequence[int]) -> MetricReport:
    if len(y_true) != len(y_pred):
        raise ShapeError(f"length mismatch: {len(y_true)} vs {len(y_pred)}")
    if len(y_true) == 0:
        raise ShapeError("need at least one prediction")
    tp = fp = fn = tn = 0
    for t, p in zip(y_true, y_pred):
        if t == 1 and p == 1:
            tp += 1
        elif t == 0 and p == 1:
            fp += 1
        elif t == 1 and p == 0:
            fn += 1
        else:
            tn += 1
    return _report_from_counts(ConfusionCounts(tp, fp, fn, tn))


def micro_metrics(
    Y_true: Sequence[Sequence[int]], Y_pred: Sequence[Sequence[int]]
) -> MetricReport:
    """Pool tp/fp/fn/tn over the three label columns, then apply the formulas.

    Per-label sub-reports are attached under the label names.
    """
    if len(Y_true) != len(Y_pred):
        raise ShapeError(f"row mismatch: {len(Y_true)} vs {len(Y_pred)}")
    width = len(LABEL_COLUMNS)
    for row in list(Y_true) + list(Y_pred):
        if len(row) != width:
            raise ShapeError(f"expected {width} label columns, got {len(row)}")
    per_label = {}
    pooled = [0, 0, 0, 0]
    for j, label in enumerate(LABEL_COLUMNS):
        report = binary_metrics([r[j] for r in Y_true], [r[j] for r in Y_pred])
        per_label[label.value] = report
        pooled[0] += report.counts.tp
        pooled[1] += report.counts.fp
        pooled[2] += report.counts.fn
        pooled[3] += report.counts.tn
    micro = _report_from_counts(ConfusionCounts(*pooled))
    micro.per_label = per_label
    return micro


def undersample(d: Dataset, targets: dict, seed: int = 0) -> Dataset:
    """Sample the targeted classes down without replacement; shuffle the rest in.

    Classes absent from `targets` are kept in full.  Works on any hashable
    class labels in d.y (e.g. Label values for the single-label pools).
    """
    if d.y is None:
        raise ValueError("undersample works on single-label datasets")
    rng = np.random.default_rng(seed)
    by_class: dict = {}
    for i, label in enumerate(d.y):
        by_class.setdefault(label, []).append(i)
    for label, target in targets.items():
        available = len(by_class.get(label, []))
        if target > available:
            raise ParameterError(f"target {target} exceeds class size {available} for {label!r}")
    kept: list[int] = []
    for label, indices in by_class.items():
        if label in targets:
            chosen = rng.choice(len(indices), size=targets[label], replace=False)
            kept.extend(indices[i] for i in sorted(chosen))
        else:
            kept.extend(indices)
    kept_arr = np.asarray(sorted(kept))
    order = rng.permutation(len(kept_arr))
    return d.subset(kept_arr[order])


def kfold_indices(n: int, k: int, seed: int = 0) -> list[np.ndarray]:
    """Seeded shuffle then contiguous near-equal folds (sizes differ by <= 1)."""
    if n < k:
        raise ParameterError(f"cannot make {k} folds from {n} rows")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    base = n // k
    extra = n % k
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(order[start : start + size])
        start += size
    return folds


def _evaluate_fold(model, d: Dataset, test_idx: np.ndarray) -> MetricReport:
    if d.is_multilabel:
        y_true = [d.Y[i] for i in test_idx]
        y_pred = [model.predict_matrix_row(d.X[i]) for i in test_idx]
        return micro_metrics(y_true, y_pred)
    y_true = [d.y[i] for i in test_idx]
    y_pred = [model.predict_label(d.X[i]) for i in test_idx]
    return binary_metrics(y_true, y_pred)


def _mean_reports(reports: list[MetricReport]) -> MetricReport:
    def mean(metric: Callable[[MetricReport], float]) -> float:
        return sum(metric(r) for r in reports) / len(reports)

    out = MetricReport(
        accuracy=mean(lambda r: r.accuracy),
        precision=mean(lambda r: r.precision),
        recall=mean(lambda r: r.recall),
        f1=mean(lambda r: r.f1),
    )
    label_keys = reports[0].per_label.keys() if reports[0].per_label else ()
    for key in label_keys:
        subs = [r.per_label[key] for r in reports]
        out.per_label[key] = MetricReport(
            accuracy=sum(s.accuracy for s in subs) / len(subs),
            precision=sum(s.precision for s in subs) / len(subs),
            recall=sum(s.recall for s in subs) / len(subs),
            f1=sum(s.f1 for s in subs) / len(subs),
        )
    return out


def kfold_cv(
    d: Dataset,
    k: int = 10,
    trainer: Callable[[Dataset], object] = None,
    seed: int = 0,
) -> MetricReport:
    """Train on k-1 folds, test on the held-out one; report unweighted means."""
    if trainer is None:
        raise ParameterError("kfold_cv needs a trainer callable")
    folds = kfold_indices(d.n, k, seed)
    reports = []
    for i, test_idx in enumerate(folds):
        train_idx = np.concatenate([folds[j] for j in range(k) if j != i])
        model = trainer(d.subset(train_idx))
        reports.append(_evaluate_fold(model, d, test_idx))
    return _mean_reports(reports)


def train_test_split(
    d: Dataset,
    train_frac: float = 0.6,
    test_frac: float = 0.3,
    seed: int = 0,
) -> tuple[Dataset, Dataset, Dataset]:
    """Seeded shuffle then contiguous slices; the unused tail is returned, not dropped."""
    if train_frac < 0 or test_frac < 0 or train_frac + test_frac > 1.0:
        raise ParameterError(f"invalid fractions ({train_frac}, {test_frac})")
    rng = np.random.default_rng(seed)
    order = rng.permutation(d.n)
    n_train = int(d.n * train_frac)
    n_test = int(d.n * test_frac)
    return (
        d.subset(order[:n_train]),
        d.subset(order[n_train : n_train + n_test]),
        d.subset(order[n_train + n_test :]),
    )


def report_rows(model_name: str, report: MetricReport, label: str = "") -> list[dict]:
    """Flatten a report into (model, label, metrics) rows for CSV export."""
    rows = []
    if report.per_label:
        for key, sub in report.per_label.items():
            rows.append(
                {
                    "model": model_name,
                    "label": key,
                    "accuracy": sub.accuracy,
                    "precision": sub.precision,
                    "recall": sub.recall,
                    "f1": sub.f1,
                }
            )
        label = label or "micro"
    rows.append(
        {
            "model": model_name,
            "label": label,
            "accuracy": report.accuracy,
            "precision": report.precision,
            "recall": report.recall,
            "f1": report.f1,
        }
    )
    return rows
