"""Shared test utilities: fixture loading and synthetic graph/corpus builders."""

from __future__ import annotations

import random

from rationale_miner.annotate import Label, load_corpus
from rationale_miner.fixtures import fixture_labels_path, fixture_log_path
from rationale_miner.ingest import CleanCommit, Sentence
from rationale_miner.kgraph import apply_inference, build_graph
from rationale_miner.pipeline import gold_label_map, ingest_commits

WORDS = (
    "memory task kernel process killer selects system patch bonus usage "
    "limit change commit update remove scan stack page size score table "
    "badness points heuristic policy boot flag driver module branch merge"
).split()


def table_iv_commit() -> CleanCommit:
    return ingest_commits(fixture_log_path().read_text(encoding="utf-8"))[0]


def table_iv_labels() -> dict:
    return gold_label_map(load_corpus(fixture_labels_path()))


def table_iv_graph(inferred: bool = True):
    g = build_graph([table_iv_commit()], table_iv_labels())
    return apply_inference(g) if inferred else g


def make_commit(
    commit_hash: str,
    texts: list[str],
    author: str = "Jane Doe",
    email: str = "jane@example.org",
    date: str = "2020-01-01T00:00:00+00:00",
) -> CleanCommit:
    sentences = tuple(Sentence(i, t) for i, t in enumerate(texts))
    return CleanCommit(
        hash=commit_hash,
        author_name=author,
        author_email=email,
        date=date,
        summary_phrase=texts[0],
        sentences=sentences,
    )


def random_hash(rng: random.Random) -> str:
    return "".join(rng.choice("0123456789abcdef") for _ in range(40))


def random_graph(rng: random.Random, max_commits: int = 50, max_sentences: int = 20):
    """Random labelled commits -> (pre-inference graph, label map)."""
    label_pool = [
        frozenset({Label.DECISION}),
        frozenset({Label.RATIONALE}),
        frozenset({Label.SUPPORTING_FACT}),
        frozenset({Label.DECISION, Label.RATIONALE}),
        frozenset({Label.RATIONALE, Label.SUPPORTING_FACT}),
        frozenset({Label.DECISION, Label.SUPPORTING_FACT}),
        frozenset({Label.DECISION, Label.RATIONALE, Label.SUPPORTING_FACT}),
        frozenset({Label.INAPPLICABLE}),
    ]
    commits = []
    labels = {}
    for _ in range(rng.randint(1, max_commits)):
        commit_hash = random_hash(rng)
        n_sentences = rng.randint(1, max_sentences)
        texts = [
            f"Sentence {i} of {commit_hash[:8]} mentions {rng.choice(WORDS)}."
            for i in range(n_sentences)
        ]
        author_id = rng.randint(0, 5)
        commits.append(
            make_commit(
                commit_hash,
                texts,
                author=f"Author Number{author_id}",
                email=f"a{author_id}@example.org",
                date=f"2020-02-{rng.randint(1, 28):02d}T12:00:00+00:00",
            )
        )
        for i in range(n_sentences):
            labels[(commit_hash, i)] = rng.choice(label_pool)
    return build_graph(commits, labels), labels
