"""Sentence labels, multi-annotator consensus, and Fleiss-kappa agreement."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable


class Label(Enum):
    DECISION = "Decision"
    RATIONALE = "Rationale"
    SUPPORTING_FACT = "SupportingFact"
    INAPPLICABLE = "Inapplicable"


#: Classification labels, in fixed column order. Inapplicable marks
#: pre-processing leftovers and is excluded from classification datasets.
CLASSIFICATION_LABELS = (Label.DECISION, Label.RATIONALE, Label.SUPPORTING_FACT)


class InsufficientAnnotationsError(ValueError):
    pass


class DegenerateAgreementError(ValueError):
    """All raters always picked one category; chance agreement is 1."""


class _NoConsensus:
    """Sentinel for sentences where no label reached the quorum."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NO_CONSENSUS"


NO_CONSENSUS = _NoConsensus()


def make_label_set(labels: Iterable[Label]) -> frozenset[Label]:
    """Validate and freeze a label set: non-empty, Inapplicable stands alone."""
    label_set = frozenset(labels)
    if not label_set:
        raise ValueError("label set must be non-empty")
    if Label.INAPPLICABLE in label_set and len(label_set) > 1:
        raise ValueError("Inapplicable cannot be combined with other labels")
    return label_set


@dataclass(frozen=True)
class Annotation:
    annotator_id: str
    commit_hash: str
    sentence_index: int
    labels: frozenset[Label]


@dataclass(frozen=True)
class SentenceRecord:
    """One labelled sentence of the gold corpus."""

    hash: str
    index: int
    text: str
    labels: frozenset[Label]


@dataclass(frozen=True)
class RatingMatrix:
    """N items x k categories count table; each row sums to n_raters."""

    counts: tuple[tuple[int, ...], ...]
    n_raters: int

    def __post_init__(self):
        if self.n_raters < 2:
            raise ValueError("need at least 2 raters")
        if not self.counts:
            raise ValueError("need at least 1 item")
        width = len(self.counts[0])
        for row in self.counts:
            if len(row) != width:
                raise ValueError("ragged count table")
            if any(c < 0 for c in row):
                raise ValueError("negative count")
            if sum(row) != self.n_raters:
                raise ValueError(f"row {row} does not sum to n_raters={self.n_raters}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], n_raters: int) -> "RatingMatrix":
        return cls(tuple(tuple(int(c) for c in row) for row in rows), n_raters)


def consensus(annotations: list[Annotation], quorum: int = 2):
    """2-of-3 style consensus: a label is kept iff >= quorum annotators chose it.

    Returns a frozenset of labels, or NO_CONSENSUS when nothing reaches the
    quorum.  An Inapplicable quorum overrides any other agreed labels.
    """
    by_annotator: dict[str, frozenset[Label]] = {}
    for a in annotations:
        seen = by_annotator.get(a.annotator_id)
        if seen is not None and seen != a.labels:
            raise ValueError(f"conflicting annotations from {a.annotator_id!r}")
        by_annotator[a.annotator_id] = a.labels
    if len(by_annotator) < quorum:
        raise InsufficientAnnotationsError(
            f"got {len(by_annotator)} annotators, need at least {quorum}"
        )
    counts: dict[Label, int] = {}
    for labels in by_annotator.values():
        for label in labels:
            counts[label] = counts.get(label, 0) + 1
    agreed = {label for label, n in counts.items() if n >= quorum}
    if Label.INAPPLICABLE in agreed:
        return frozenset({Label.INAPPLICABLE})
    if agreed:
        return frozenset(agreed)
    return NO_CONSENSUS


def fleiss_kappa(m: RatingMatrix) -> float:
    """Chance-corrected agreement for a fixed number of raters.

    kappa = (P_bar - Pe_bar) / (1 - Pe_bar) with per-item agreement
    P_i = (sum_j n_ij^2 - n) / (n (n - 1)) and chance agreement
    Pe_bar = sum_j p_j^2 over category shares p_j.
    """
    n = m.n_raters
    big_n = len(m.counts)
    p_items = [(sum(c * c for c in row) - n) / (n * (n - 1)) for row in m.counts]
    p_bar = sum(p_items) / big_n
    totals = [sum(row[j] for row in m.counts) for j in range(len(m.counts[0]))]
    p_cats = [t / (big_n * n) for t in totals]
    pe_bar = sum(p * p for p in p_cats)
    if pe_bar >= 1.0:
        raise DegenerateAgreementError("all raters always picked the same category")
    return (p_bar - pe_bar) / (1.0 - pe_bar)


def binary_rating_matrix(annotations: list[Annotation], label: Label) -> RatingMatrix:
    """Yes/no count table for one label over all sentences of a round."""
    groups: dict[tuple[str, int], dict[str, frozenset[Label]]] = {}
    for a in annotations:
        group = groups.setdefault((a.commit_hash, a.sentence_index), {})
        seen = group.get(a.annotator_id)
        if seen is not None and seen != a.labels:
            raise ValueError(f"conflicting annotations from {a.annotator_id!r}")
        group[a.annotator_id] = a.labels
    if not groups:
        raise ValueError("empty annotation round")
    n_raters = {len(g) for g in groups.values()}
    if len(n_raters) != 1:
        raise ValueError(f"uneven annotator counts across sentences: {sorted(n_raters)}")
    n = n_raters.pop()
    rows = []
    for key in sorted(groups):
        yes = sum(1 for labels in groups[key].values() if label in labels)
        rows.append((yes, n - yes))
    return RatingMatrix.from_rows(rows, n)


def per_label_kappa(
    annotations: list[Annotation],
    labels: tuple[Label, ...] = CLASSIFICATION_LABELS,
) -> dict[Label, float]:
    """Fleiss kappa of the per-label yes/no reduction, one value per label.

    Raises DegenerateAgreementError (naming the label) when a label was used
    unanimously-never or unanimously-always.
    """
    result = {}
    for label in labels:
        try:
            result[label] = fleiss_kappa(binary_rating_matrix(annotations, label))
        except DegenerateAgreementError as exc:
            raise DegenerateAgreementError(f"{label.value}: {exc}") from exc
    return result


def mean_kappa(per_label: dict[Label, float]) -> float:
    return sum(per_label.values()) / len(per_label)


# --- corpus / annotation round files (JSONL) -------------------------------


def load_corpus(path: str | Path) -> list[SentenceRecord]:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        records.append(
            SentenceRecord(
                hash=obj["hash"],
                index=int(obj["index"]),
                text=obj["text"],
                labels=make_label_set(Label(name) for name in obj["labels"]),
            )
        )
    return records


def dump_corpus(records: Iterable[SentenceRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(
                json.dumps(
                    {
                        "hash": r.hash,
                        "index": r.index,
                        "text": r.text,
                        "labels": sorted(label.value for label in r.labels),
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def load_annotations(path: str | Path) -> list[Annotation]:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        rows.append(
            Annotation(
                annotator_id=obj["annotator_id"],
                commit_hash=obj["hash"],
                sentence_index=int(obj["index"]),
                labels=make_label_set(Label(name) for name in obj["labels"]),
            )
        )
    return rows
