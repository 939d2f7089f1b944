"""Decision/rationale knowledge graph: typed assertions plus rule inference.

Nodes are namespaced ids (commit:c1, sentence:c1/0, author:jane-doe,
ct:Rationale).  Assertions come in three kinds:

  concepts    (node, concept)          e.g. ("sentence:c1/0", "Sentence")
  edges       (relation, source, target)
  attributes  (node, key, value)       value is a string or int

The three classification types are fixed individuals (ct:Decision,
ct:Rationale, ct:SupportingFact), each typed with its own concept and with
SentenceClassificationType.  Derived sentence subtypes and
CommitWithRationale are produced by forward-chaining rules run to fixpoint.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from .annotate import Label
from .ingest import CleanCommit

RELATIONS = ("contains", "hasAuthor", "nextSentence", "hasClassification")
ATTRIBUTE_KEYS = ("hasIdentifier", "text", "sentenceOrder", "authorName", "date")
CONCEPTS = (
    "Commit",
    "Sentence",
    "Author",
    "SentenceClassificationType",
    "Decision",
    "Rationale",
    "SupportingFact",
    "DecisionSentence",
    "RationaleSentence",
    "SupportingFactSentence",
    "CommitWithRationale",
)

CT_NODES = {
    Label.DECISION: "ct:Decision",
    Label.RATIONALE: "ct:Rationale",
    Label.SUPPORTING_FACT: "ct:SupportingFact",
}

# relation -> (domain concept, range concept)
_EDGE_TYPING = {
    "contains": ("Commit", "Sentence"),
    "hasAuthor": ("Commit", "Author"),
    "nextSentence": ("Sentence", "Sentence"),
    "hasClassification": ("Sentence", "SentenceClassificationType"),
}


class DuplicateNodeError(ValueError):
    pass


class IncompleteLabelsError(ValueError):
    pass


class UnknownNodeError(LookupError):
    pass


@dataclass
class KnowledgeGraph:
    concepts: set[tuple[str, str]] = field(default_factory=set)
    edges: set[tuple[str, str, str]] = field(default_factory=set)
    attributes: set[tuple[str, str, object]] = field(default_factory=set)

    def copy(self) -> "KnowledgeGraph":
        return KnowledgeGraph(set(self.concepts), set(self.edges), set(self.attributes))

    def nodes(self) -> set[str]:
        return {node for node, _ in self.concepts}

    def nodes_with_concept(self, concept: str) -> set[str]:
        return {node for node, c in self.concepts if c == concept}

    def has_concept(self, node: str, concept: str) -> bool:
        return (node, concept) in self.concepts

    def edge_pairs(self, relation: str) -> list[tuple[str, str]]:
        return [(s, t) for r, s, t in self.edges if r == relation]

    def attr(self, node: str, key: str):
        for n, k, v in self.attributes:
            if n == node and k == key:
                return v
        return None

    def size(self) -> int:
        return len(self.concepts) + len(self.edges) + len(self.attributes)

    def triples(self) -> list[tuple[str, str, object]]:
        """Uniform triple view: concept membership uses the predicate 'a'."""
        out: list[tuple[str, str, object]] = [(n, "a", c) for n, c in self.concepts]
        out.extend((s, r, t) for r, s, t in self.edges)
        out.extend(self.attributes)
        return out

    def to_json(self) -> str:
        def sort_key(item):
            return tuple(str(part) for part in item)

        payload = {
            "concepts": sorted(([n, c] for n, c in self.concepts), key=sort_key),
            "edges": sorted(([r, s, t] for r, s, t in self.edges), key=sort_key),
            "attributes": sorted(([n, k, v] for n, k, v in self.attributes), key=sort_key),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "KnowledgeGraph":
        payload = json.loads(text)
        return cls(
            concepts={(n, c) for n, c in payload["concepts"]},
            edges={(r, s, t) for r, s, t in payload["edges"]},
            attributes={(n, k, v) for n, k, v in payload["attributes"]},
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "KnowledgeGraph":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def _slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return slug or "anonymous"


def _date_key(date: str):
    try:
        parsed = datetime.fromisoformat(date)
    except ValueError:
        return (1, datetime.min.replace(tzinfo=timezone.utc), date)
    if parsed.tzinfo is None:  # naive timestamps sort as UTC
        parsed = parsed.replace(tzinfo=timezone.utc)
    return (0, parsed, date)


def build_graph(
    commits: Iterable[CleanCommit],
    labels: dict[tuple[str, int], Iterable[Label]],
) -> KnowledgeGraph:
    """Assemble the graph from cleaned commits and per-sentence label sets.

    Commits get short ids c1, c2, ... in date order.  Authors are
    deduplicated by lowercased (name, email).  Sentences labelled only
    Inapplicable (or with an empty predicted set) carry no classification
    edge.  Every (hash, index) must be present in `labels`.
    """
    commits = list(commits)
    g = KnowledgeGraph()
    if not commits:
        return g

    seen_hashes = set()
    for c in commits:
        if c.hash in seen_hashes:
            raise DuplicateNodeError(f"duplicate commit hash {c.hash}")
        seen_hashes.add(c.hash)

    for label, node in CT_NODES.items():
        g.concepts.add((node, label.value))
        g.concepts.add((node, "SentenceClassificationType"))

    author_ids: dict[tuple[str, str], str] = {}
    used_slugs: set[str] = set()
    ordered = sorted(commits, key=lambda c: (_date_key(c.date), c.hash))
    for k, commit in enumerate(ordered, start=1):
        commit_node = f"commit:c{k}"
        g.concepts.add((commit_node, "Commit"))
        g.attributes.add((commit_node, "hasIdentifier", commit.hash))
        g.attributes.add((commit_node, "date", commit.date))

        identity = (commit.author_name.lower(), commit.author_email.lower())
        if identity not in author_ids:
            slug = _slugify(commit.author_name)
            candidate = f"author:{slug}"
            suffix = 2
            while candidate in used_slugs:
                candidate = f"author:{slug}-{suffix}"
                suffix += 1
            used_slugs.add(candidate)
            author_ids[identity] = candidate
            g.concepts.add((candidate, "Author"))
            g.attributes.add((candidate, "authorName", commit.author_name))
        g.edges.add(("hasAuthor", commit_node, author_ids[identity]))

        previous = None
        for sentence in commit.sentences:
            key = (commit.hash, sentence.index)
            if key not in labels:
                raise IncompleteLabelsError(f"no label set for {key}")
            node = f"sentence:c{k}/{sentence.index}"
            g.concepts.add((node, "Sentence"))
            g.attributes.add((node, "text", sentence.text))
            g.attributes.add((node, "sentenceOrder", sentence.index))
            g.edges.add(("contains", commit_node, node))
            if previous is not None:
                g.edges.add(("nextSentence", previous, node))
            previous = node
            for label in labels[key]:
                if label is Label.INAPPLICABLE:
                    continue
                g.edges.add(("hasClassification", node, CT_NODES[label]))
    return g


# --- rule inference ---------------------------------------------------------


@dataclass(frozen=True)
class ConceptPattern:
    var: str
    concept: str


@dataclass(frozen=True)
class EdgePattern:
    relation: str
    source: str
    target: str


@dataclass(frozen=True)
class InferenceRule:
    """Monotone rule: conjunction of patterns -> one concept assertion."""

    name: str
    antecedent: tuple
    consequent: tuple[str, str]  # (variable, concept)

    def __post_init__(self):
        bound = set()
        for p in self.antecedent:
            if isinstance(p, ConceptPattern):
                bound.add(p.var)
            else:
                bound.update((p.source, p.target))
        if self.consequent[0] not in bound:
            raise ValueError(f"rule {self.name}: consequent variable unbound")


def _sentence_subtype_rule(ct_concept: str, derived: str) -> InferenceRule:
    return InferenceRule(
        name=f"{derived}-from-classification",
        antecedent=(
            ConceptPattern("s", "Sentence"),
            EdgePattern("hasClassification", "s", "ct"),
            ConceptPattern("ct", ct_concept),
        ),
        consequent=("s", derived),
    )


DEFAULT_RULES = (
    _sentence_subtype_rule("Rationale", "RationaleSentence"),
    _sentence_subtype_rule("Decision", "DecisionSentence"),
    _sentence_subtype_rule("SupportingFact", "SupportingFactSentence"),
    InferenceRule(
        name="commit-with-rationale",
        antecedent=(
            ConceptPattern("c", "Commit"),
            EdgePattern("contains", "c", "s"),
            ConceptPattern("s", "RationaleSentence"),
        ),
        consequent=("c", "CommitWithRationale"),
    ),
)


class _GraphIndex:
    def __init__(self, g: KnowledgeGraph):
        self.by_concept: dict[str, set[str]] = {}
        for node, concept in g.concepts:
            self.by_concept.setdefault(concept, set()).add(node)
        self.by_relation: dict[str, list[tuple[str, str]]] = {}
        self.by_relation_source: dict[tuple[str, str], list[str]] = {}
        self.by_relation_target: dict[tuple[str, str], list[str]] = {}
        for relation, source, target in g.edges:
            self.by_relation.setdefault(relation, []).append((source, target))
            self.by_relation_source.setdefault((relation, source), []).append(target)
            self.by_relation_target.setdefault((relation, target), []).append(source)

    def edge_candidates(self, pattern: EdgePattern, binding: dict) -> list[tuple[str, str]]:
        source = binding.get(pattern.source)
        target = binding.get(pattern.target)
        if source is not None:
            return [(source, t) for t in self.by_relation_source.get((pattern.relation, source), ())]
        if target is not None:
            return [(s, target) for s in self.by_relation_target.get((pattern.relation, target), ())]
        return self.by_relation.get(pattern.relation, [])


def _rule_matches(index: _GraphIndex, rule: InferenceRule) -> set[tuple[str, str]]:
    bindings: list[dict[str, str]] = [{}]
    for pattern in rule.antecedent:
        extended = []
        if isinstance(pattern, ConceptPattern):
            members = index.by_concept.get(pattern.concept, set())
            for binding in bindings:
                bound = binding.get(pattern.var)
                if bound is not None:
                    if bound in members:
                        extended.append(binding)
                else:
                    for node in members:
                        extended.append({**binding, pattern.var: node})
        else:
            for binding in bindings:
                for source, target in index.edge_candidates(pattern, binding):
                    if binding.get(pattern.source, source) != source:
                        continue
                    if binding.get(pattern.target, target) != target:
                        continue
                    extended.append({**binding, pattern.source: source, pattern.target: target})
        bindings = extended
        if not bindings:
            break
    variable, concept = rule.consequent
    return {(b[variable], concept) for b in bindings}


def apply_inference(
    g: KnowledgeGraph, rules: tuple[InferenceRule, ...] = DEFAULT_RULES
) -> KnowledgeGraph:
    """Run the rules to fixpoint; returns a new graph, input untouched."""
    out = g.copy()
    changed = True
    while changed:
        changed = False
        index = _GraphIndex(out)
        for rule in rules:
            new = _rule_matches(index, rule) - out.concepts
            if new:
                out.concepts |= new
                changed = True
        # concepts added in this sweep are only visible to the next sweep's
        # index, so the loop runs until a full sweep adds nothing
    return out


# --- consistency checking ---------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    nodes: tuple[str, ...] = ()


def check_consistency(g: KnowledgeGraph) -> list[Violation]:
    """Structural checks; violations are data, not exceptions."""
    violations: list[Violation] = []
    known = g.nodes()

    for relation, source, target in sorted(g.edges):
        domain, range_ = _EDGE_TYPING.get(relation, (None, None))
        if source not in known or target not in known:
            violations.append(
                Violation("dangling", f"{relation} edge touches unknown node", (source, target))
            )
            continue
        if domain and not g.has_concept(source, domain):
            violations.append(
                Violation("domain", f"{relation} source {source} is not a {domain}", (source,))
            )
        if range_ and not g.has_concept(target, range_):
            violations.append(
                Violation("range", f"{relation} target {target} is not a {range_}", (target,))
            )

    classification = {(s, t) for r, s, t in g.edges if r == "hasClassification"}
    for s, t in sorted(classification):
        if s < t and (t, s) in classification:
            violations.append(
                Violation("asymmetry", "hasClassification must not hold in both directions", (s, t))
            )

    nexts = g.edge_pairs("nextSentence")
    adjacency: dict[str, list[str]] = {}
    in_deg: dict[str, int] = {}
    for s, t in nexts:
        adjacency.setdefault(s, []).append(t)
        in_deg[t] = in_deg.get(t, 0) + 1
    for node, targets in sorted(adjacency.items()):
        if len(targets) > 1:
            violations.append(
                Violation("chain-branch", f"{node} has {len(targets)} nextSentence successors", (node,))
            )
    for node, degree in sorted(in_deg.items()):
        if degree > 1:
            violations.append(
                Violation("chain-branch", f"{node} has {degree} nextSentence predecessors", (node,))
            )
    # depth-first search; a back edge to a node still on the stack is a cycle
    state: dict[str, int] = {}  # 1 = on stack, 2 = finished
    cycle_nodes: set[str] = set()
    for root in sorted(adjacency):
        if state.get(root):
            continue
        state[root] = 1
        stack = [(root, iter(sorted(adjacency.get(root, ()))))]
        while stack:
            node, successors = stack[-1]
            nxt = next(successors, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
            elif state.get(nxt, 0) == 0:
                state[nxt] = 1
                stack.append((nxt, iter(sorted(adjacency.get(nxt, ())))))
            elif state[nxt] == 1:
                cycle_nodes.add(nxt)
    for node in sorted(cycle_nodes):
        violations.append(Violation("chain-cycle", f"nextSentence cycle through {node}", (node,)))

    order_of = {n: v for n, k, v in g.attributes if k == "sentenceOrder"}
    contains = g.edge_pairs("contains")
    for commit in sorted(g.nodes_with_concept("Commit")):
        orders = sorted(order_of[s] for c, s in contains if c == commit and s in order_of)
        if orders and orders != list(range(len(orders))):
            violations.append(
                Violation("order-gap", f"{commit} sentence orders {orders} are not 0..n-1", (commit,))
            )
    return violations
