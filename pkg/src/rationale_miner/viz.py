"""Collapsible-tree export (authors -> commits -> sentence leaves) and
per-commit rationale density."""

from __future__ import annotations

from datetime import datetime, timezone

from .annotate import Label
from .kgraph import CT_NODES, KnowledgeGraph, UnknownNodeError

#: Leaf fill colors keyed by the label combination, matching the corpus
#: color coding; anything else falls back to neutral grey.
PALETTE = {
    frozenset({Label.DECISION}): "#ADD8E6",
    frozenset({Label.SUPPORTING_FACT}): "#FFFACD",
    frozenset({Label.RATIONALE}): "#F4C2C2",
    frozenset({Label.SUPPORTING_FACT, Label.RATIONALE}): "#FFAE42",
    frozenset({Label.RATIONALE, Label.DECISION}): "#C8A2C8",
}
FALLBACK_COLOR = "#CCCCCC"

_LABEL_ORDER = (Label.DECISION, Label.RATIONALE, Label.SUPPORTING_FACT)


def leaf_color(labels: frozenset[Label]) -> str:
    return PALETTE.get(frozenset(labels), FALLBACK_COLOR)


def _date_key(value):
    try:
        parsed = datetime.fromisoformat(str(value))
    except ValueError:
        return (1, datetime.min.replace(tzinfo=timezone.utc), str(value))
    if parsed.tzinfo is None:  # naive timestamps sort as UTC
        parsed = parsed.replace(tzinfo=timezone.utc)
    return (0, parsed, str(value))


def rationale_density(g: KnowledgeGraph, commit: str) -> float:
    """Share of a commit's sentences that were inferred RationaleSentence."""
    if not g.has_concept(commit, "Commit"):
        raise UnknownNodeError(f"no commit node {commit!r}")
    sentences = [t for c, t in g.edge_pairs("contains") if c == commit]
    if not sentences:
        raise ValueError(f"{commit} contains no sentences")
    rationale = sum(1 for s in sentences if g.has_concept(s, "RationaleSentence"))
    return rationale / len(sentences)


def export_viz_json(g: KnowledgeGraph) -> dict:
    """Build the viewer tree from a post-inference graph.

    Authors sort by name, commits by date, sentences by order.  Commit
    has_rationale mirrors the inferred CommitWithRationale concept; an
    author has rationale when any of their commits does.
    """
    ct_labels = {node: label for label, node in CT_NODES.items()}
    classifications: dict[str, set[Label]] = {}
    for s, t in g.edge_pairs("hasClassification"):
        if t in ct_labels:
            classifications.setdefault(s, set()).add(ct_labels[t])

    contains: dict[str, list[str]] = {}
    for c, s in g.edge_pairs("contains"):
        contains.setdefault(c, []).append(s)

    commits_by_author: dict[str, list[str]] = {}
    for c, a in g.edge_pairs("hasAuthor"):
        commits_by_author.setdefault(a, []).append(c)

    authors = []
    for author_node in sorted(
        commits_by_author, key=lambda a: (str(g.attr(a, "authorName")), a)
    ):
        commit_entries = []
        for commit_node in sorted(
            commits_by_author[author_node],
            key=lambda c: (_date_key(g.attr(c, "date")), str(g.attr(c, "hasIdentifier"))),
        ):
            sentences = []
            for node in sorted(
                contains.get(commit_node, []), key=lambda s: g.attr(s, "sentenceOrder")
            ):
                labels = frozenset(classifications.get(node, set()))
                sentences.append(
                    {
                        "order": g.attr(node, "sentenceOrder"),
                        "text": g.attr(node, "text"),
                        "labels": [l.value for l in _LABEL_ORDER if l in labels],
                        "color": leaf_color(labels),
                    }
                )
            commit_entries.append(
                {
                    "short_id": commit_node.split(":", 1)[1],
                    "hash": g.attr(commit_node, "hasIdentifier"),
                    "has_rationale": g.has_concept(commit_node, "CommitWithRationale"),
                    "sentences": sentences,
                }
            )
        authors.append(
            {
                "name": g.attr(author_node, "authorName"),
                "has_rationale": any(c["has_rationale"] for c in commit_entries),
                "commits": commit_entries,
            }
        )
    return {"authors": authors}
