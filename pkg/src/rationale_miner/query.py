"""Triple-pattern SELECT queries over the knowledge graph.

Supported subset: SELECT with plain variables and (BOUND(?v) AS ?alias)
projections, WHERE with mandatory patterns and OPTIONAL { ... } groups,
ORDER BY.  Prefixed names (rationale:Commit) are opaque: no IRI expansion
happens; a constant matches a graph symbol either verbatim or by its local
part after the first colon, so vocabulary names and namespaced node ids
both resolve.  Concept membership appears as triples with predicate `a`;
a variable in predicate position matches it too (that is how the bundled
report detects CommitWithRationale).  Results use set semantics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .kgraph import KnowledgeGraph


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnsupportedFeatureError(ValueError):
    def __init__(self, token: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: unsupported clause {token!r}")
        self.token = token


@dataclass(frozen=True)
class Variable:
    name: str  # without the leading '?'


Term = Union[Variable, str, int]


@dataclass(frozen=True)
class TriplePattern:
    subject: Term
    predicate: Term
    object: Term


@dataclass(frozen=True)
class BoundTest:
    var: str
    alias: str


@dataclass
class SelectQuery:
    projection: list  # Variable | BoundTest
    where: list[TriplePattern]
    optionals: list[list[TriplePattern]] = field(default_factory=list)
    order_by: list[str] = field(default_factory=list)

    def __post_init__(self):
        aliases = [p.alias for p in self.projection if isinstance(p, BoundTest)]
        if len(aliases) != len(set(aliases)):
            raise ValueError("duplicate projection aliases")
        known = {v.name for v in self.projection if isinstance(v, Variable)}
        for pattern in self.where:
            for term in (pattern.subject, pattern.predicate, pattern.object):
                if isinstance(term, Variable):
                    known.add(term.name)
        for var in self.order_by:
            if var not in known:
                raise ValueError(f"ORDER BY variable ?{var} not in projection or WHERE")


_UNSUPPORTED = {
    "filter",
    "union",
    "graph",
    "limit",
    "offset",
    "group",
    "having",
    "minus",
    "bind",
    "values",
    "distinct",
    "reduced",
    "describe",
    "construct",
    "ask",
    "prefix",
    "exists",
    "service",
}

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>\#[^\n]*)
    | (?P<punct>[{}().])
    | (?P<var>\?[A-Za-z_][\w]*)
    | (?P<string>"(?:[^"\\]|\\.)*")
    | (?P<int>-?\d+)
    | (?P<name>[A-Za-z_][\w:/@+-]*)
    | (?P<other>.)
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line = 1
    line_start = 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def _error(self, message: str) -> QuerySyntaxError:
        if self.pos < len(self.tokens):
            t = self.tokens[self.pos]
            return QuerySyntaxError(message, t.line, t.column)
        last = self.tokens[-1] if self.tokens else _Token("", "", 1, 1)
        return QuerySyntaxError(message + " (at end of input)", last.line, last.column)

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Token:
        token = self.peek()
        if token is None:
            raise self._error("unexpected end of query")
        self.pos += 1
        return token

    def expect_punct(self, text: str) -> None:
        token = self.next()
        if token.kind != "punct" or token.text != text:
            raise QuerySyntaxError(f"expected {text!r}, got {token.text!r}", token.line, token.column)

    def keyword(self, token: _Token) -> str:
        return token.text.lower() if token.kind == "name" else ""

    def check_supported(self, token: _Token) -> None:
        if self.keyword(token) in _UNSUPPORTED:
            raise UnsupportedFeatureError(token.text, token.line, token.column)

    def parse(self) -> SelectQuery:
        token = self.next()
        if self.keyword(token) != "select":
            self.check_supported(token)
            raise QuerySyntaxError(f"expected SELECT, got {token.text!r}", token.line, token.column)
        projection = self.parse_projection()
        token = self.next()
        if self.keyword(token) != "where":
            raise QuerySyntaxError(f"expected WHERE, got {token.text!r}", token.line, token.column)
        self.expect_punct("{")
        where, optionals = self.parse_group_body(allow_optional=True)
        order_by = []
        token = self.peek()
        if token is not None and self.keyword(token) == "order":
            self.next()
            by = self.next()
            if self.keyword(by) != "by":
                raise QuerySyntaxError("expected BY after ORDER", by.line, by.column)
            while True:
                token = self.peek()
                if token is None or token.kind != "var":
                    break
                order_by.append(self.next().text[1:])
            if not order_by:
                raise self._error("ORDER BY needs at least one variable")
        token = self.peek()
        if token is not None:
            self.check_supported(token)
            raise QuerySyntaxError(f"trailing input {token.text!r}", token.line, token.column)
        if not where:
            raise self._error("WHERE block has no mandatory patterns")
        return SelectQuery(projection=projection, where=where, optionals=optionals, order_by=order_by)

    def parse_projection(self) -> list:
        items: list = []
        while True:
            token = self.peek()
            if token is None:
                raise self._error("unexpected end in SELECT list")
            if token.kind == "var":
                items.append(Variable(self.next().text[1:]))
                continue
            if token.kind == "punct" and token.text == "(":
                self.next()
                name = self.next()
                if self.keyword(name) != "bound":
                    self.check_supported(name)
                    raise QuerySyntaxError(
                        f"expected BOUND, got {name.text!r}", name.line, name.column
                    )
                self.expect_punct("(")
                var = self.next()
                if var.kind != "var":
                    raise QuerySyntaxError("BOUND needs a variable", var.line, var.column)
                self.expect_punct(")")
                as_token = self.next()
                if self.keyword(as_token) != "as":
                    raise QuerySyntaxError("expected AS", as_token.line, as_token.column)
                alias = self.next()
                if alias.kind != "var":
                    raise QuerySyntaxError("alias must be a variable", alias.line, alias.column)
                self.expect_punct(")")
                items.append(BoundTest(var=var.text[1:], alias=alias.text[1:]))
                continue
            break
        if not items:
            raise self._error("SELECT list is empty")
        return items

    def parse_group_body(self, allow_optional: bool) -> tuple[list[TriplePattern], list[list[TriplePattern]]]:
        patterns: list[TriplePattern] = []
        optionals: list[list[TriplePattern]] = []
        while True:
            token = self.peek()
            if token is None:
                raise self._error("unterminated group, expected '}'")
            if token.kind == "punct" and token.text == "}":
                self.next()
                return patterns, optionals
            if self.keyword(token) == "optional":
                if not allow_optional:
                    raise UnsupportedFeatureError(token.text, token.line, token.column)
                self.next()
                self.expect_punct("{")
                inner, nested = self.parse_group_body(allow_optional=False)
                if nested:  # defensive; nested OPTIONAL is rejected above
                    raise UnsupportedFeatureError("OPTIONAL", token.line, token.column)
                optionals.append(inner)
                continue
            self.check_supported(token)
            patterns.append(self.parse_triple())

    def parse_triple(self) -> TriplePattern:
        terms = [self.parse_term(), self.parse_term(), self.parse_term()]
        token = self.peek()
        if token is not None and token.kind == "punct" and token.text == ".":
            self.next()
        return TriplePattern(*terms)

    def parse_term(self) -> Term:
        token = self.next()
        if token.kind == "var":
            return Variable(token.text[1:])
        if token.kind == "int":
            return int(token.text)
        if token.kind == "string":
            return token.text[1:-1].replace('\\"', '"').replace("\\\\", "\\")
        if token.kind == "name":
            self.check_supported(token)
            return token.text
        raise QuerySyntaxError(
            f"expected a term, got {token.text!r}", token.line, token.column
        )


def parse_query(text: str) -> SelectQuery:
    tokens = _tokenize(text)
    if not tokens:
        raise QuerySyntaxError("empty query", 1, 1)
    return _Parser(tokens).parse()


# --- evaluation -------------------------------------------------------------


def _local_name(constant: str) -> str:
    _, _, local = constant.partition(":")
    return local


def _constant_matches(constant, value) -> bool:
    if constant == value:
        return True
    if isinstance(constant, str) and isinstance(value, str) and ":" in constant:
        return _local_name(constant) == value
    return False


class _TripleIndex:
    def __init__(self, triples: list[tuple]):
        self.all = triples
        self.by_predicate: dict = {}
        self.by_subject: dict = {}
        for triple in triples:
            self.by_predicate.setdefault(triple[1], []).append(triple)
            self.by_subject.setdefault(triple[0], []).append(triple)

    def _lookup(self, index: dict, constant) -> list[tuple]:
        matches = list(index.get(constant, ()))
        if isinstance(constant, str) and ":" in constant:
            local = _local_name(constant)
            if local != constant:
                matches.extend(index.get(local, ()))
        return matches

    def candidates(self, pattern: TriplePattern, binding: dict) -> list[tuple]:
        def resolve(term):
            if isinstance(term, Variable):
                return binding.get(term.name, _UNSET)
            return term

        subject = resolve(pattern.subject)
        if subject is not _UNSET:
            return self._lookup(self.by_subject, subject)
        predicate = resolve(pattern.predicate)
        if predicate is not _UNSET:
            return self._lookup(self.by_predicate, predicate)
        return self.all


def _match_term(term, value, binding: dict) -> dict | None:
    if isinstance(term, Variable):
        bound = binding.get(term.name, _UNSET)
        if bound is _UNSET:
            extended = dict(binding)
            extended[term.name] = value
            return extended
        return binding if bound == value else None
    return binding if _constant_matches(term, value) else None


_UNSET = object()


def _join(patterns: list[TriplePattern], index: _TripleIndex, seed: dict) -> list[dict]:
    rows = [seed]
    for pattern in patterns:
        extended = []
        for binding in rows:
            for s, p, o in index.candidates(pattern, binding):
                b1 = _match_term(pattern.subject, s, binding)
                if b1 is None:
                    continue
                b2 = _match_term(pattern.predicate, p, b1)
                if b2 is None:
                    continue
                b3 = _match_term(pattern.object, o, b2)
                if b3 is not None:
                    extended.append(b3)
        rows = extended
        if not rows:
            break
    return rows


def _sort_key(value):
    if isinstance(value, bool):
        return (1, int(value), "")
    if isinstance(value, int):
        return (2, value, "")
    return (3, 0, str(value))


def evaluate(q: SelectQuery, g: KnowledgeGraph) -> list[dict]:
    """Evaluate against a (normally post-inference) graph.

    Returns one dict per result row; variables that an OPTIONAL group left
    unbound are absent from the row.
    """
    index = _TripleIndex(g.triples())
    rows = _join(q.where, index, {})
    for group in q.optionals:
        augmented = []
        for binding in rows:
            matches = _join(group, index, binding)
            augmented.extend(matches if matches else [binding])
        rows = augmented

    if q.order_by:
        for var in reversed(q.order_by):
            rows.sort(key=lambda b, v=var: _sort_key(b.get(v)) if v in b else (0, 0, ""))

    projected: list[dict] = []
    seen = set()
    for binding in rows:
        row = {}
        for item in q.projection:
            if isinstance(item, Variable):
                if item.name in binding:
                    row[item.name] = binding[item.name]
            else:
                row[item.alias] = item.var in binding
        key = tuple(sorted(row.items(), key=lambda kv: (kv[0], str(kv[1]))))
        if key not in seen:
            seen.add(key)
            projected.append(row)
    return projected


#: Bundled report: commits, their authors, every sentence with its order and
#: text, plus bound-tests for the inferred commit/sentence concepts.
RATIONALE_REPORT_QUERY = """
SELECT ?author ?commit_id ?order ?text
(BOUND(?hasRationale) AS ?isCommitWithRationale)
(BOUND(?rct) AS ?isSentenceRationale)
(BOUND(?dct) AS ?isSentenceDecision)
(BOUND(?sct) AS ?isSentenceSupporting)
WHERE {
  ?commit a rationale:Commit .
  ?commit baseV:hasIdentifier ?commit_id .
  ?commit rationale:hasAuthor ?author_id .
  ?author_id authorV:authorName ?author .
  ?commit baseV:contains ?s .
  ?s rationale:text ?text .
  ?s rationale:sentenceOrder ?order
  OPTIONAL {
    ?commit ?hasRationale rationale:CommitWithRationale .
  }
  OPTIONAL {
    ?s ?rct rationale:RationaleSentence .
  }
  OPTIONAL {
    ?s ?dct rationale:DecisionSentence .
  }
  OPTIONAL {
    ?s ?sct rationale:SupportingFactSentence .
  }
}
ORDER BY ?commit_id ?order
"""


def builtin_rationale_report(g: KnowledgeGraph) -> list[dict]:
    return evaluate(parse_query(RATIONALE_REPORT_QUERY), g)
