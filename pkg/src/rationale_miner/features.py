"""TF-IDF sentence embedding: tokenizer, fitted vocabulary, sparse vectors.

Matches the common vectorizer defaults: smoothed idf
ln((1 + n_docs) / (1 + df)) + 1, raw term counts, L2-normalized output.
Column order is lexicographic so serialization is deterministic.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

_TOKEN_RE = re.compile(r"\w{2,}")


class EmptyVocabularyError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    """Lowercased maximal runs of >= 2 word characters."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]  # lexicographic; positions are column indices
    df: tuple[int, ...]
    n_documents: int

    def __post_init__(self):
        if list(self.terms) != sorted(self.terms):
            raise ValueError("terms must be in lexicographic order")
        if len(set(self.terms)) != len(self.terms):
            raise ValueError("duplicate terms")
        if any(d < 1 or d > self.n_documents for d in self.df):
            raise ValueError("df out of range")

    def __len__(self):
        return len(self.terms)


@dataclass(frozen=True)
class FeatureVector:
    weights: dict[int, float]
    dimension: int

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights.values()))

    def get(self, column: int) -> float:
        return self.weights.get(column, 0.0)

    def dot(self, other: "FeatureVector") -> float:
        a, b = self.weights, other.weights
        if len(b) < len(a):
            a, b = b, a
        return sum(w * b[i] for i, w in a.items() if i in b)


class TfIdfModel:
    def __init__(self, vocabulary: Vocabulary):
        self.vocabulary = vocabulary
        n = vocabulary.n_documents
        self.idf = tuple(math.log((1 + n) / (1 + df)) + 1.0 for df in vocabulary.df)
        self._column = {term: i for i, term in enumerate(vocabulary.terms)}

    @property
    def dimension(self) -> int:
        return len(self.vocabulary)

    def transform(self, text: str) -> FeatureVector:
        counts = Counter(tokenize(text))
        weights = {}
        for term, count in counts.items():
            col = self._column.get(term)
            if col is not None:
                weights[col] = count * self.idf[col]
        norm = math.sqrt(sum(w * w for w in weights.values()))
        if norm > 0:
            weights = {col: w / norm for col, w in weights.items()}
        return FeatureVector(weights, self.dimension)

    def to_dict(self) -> dict:
        return {
            "terms": list(self.vocabulary.terms),
            "df": list(self.vocabulary.df),
            "n_documents": self.vocabulary.n_documents,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TfIdfModel":
        return cls(Vocabulary(tuple(data["terms"]), tuple(data["df"]), data["n_documents"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TfIdfModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def fit_tfidf(corpus: list[str]) -> TfIdfModel:
    """Fit vocabulary and document frequencies over the corpus."""
    if not corpus:
        raise ValueError("corpus must be non-empty")
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(set(tokenize(doc)))
    if not df:
        raise EmptyVocabularyError("corpus contains no tokens")
    terms = tuple(sorted(df))
    vocab = Vocabulary(terms, tuple(df[t] for t in terms), len(corpus))
    return TfIdfModel(vocab)


def transform(model: TfIdfModel, text: str) -> FeatureVector:
    return model.transform(text)
