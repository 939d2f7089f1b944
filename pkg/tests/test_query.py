import random

import pytest

from rationale_miner.kgraph import KnowledgeGraph, apply_inference
from rationale_miner.query import (
    BoundTest,
    QuerySyntaxError,
    RATIONALE_REPORT_QUERY,
    SelectQuery,
    TriplePattern,
    UnsupportedFeatureError,
    Variable,
    builtin_rationale_report,
    evaluate,
    parse_query,
)

from helpers import random_graph, table_iv_graph


# --- parser -----------------------------------------------------------------


def test_bundled_report_query_shape():
    q = parse_query(RATIONALE_REPORT_QUERY)
    bound_tests = [p for p in q.projection if isinstance(p, BoundTest)]
    plain_vars = [p for p in q.projection if isinstance(p, Variable)]
    assert len(bound_tests) == 4
    assert [b.alias for b in bound_tests] == [
        "isCommitWithRationale",
        "isSentenceRationale",
        "isSentenceDecision",
        "isSentenceSupporting",
    ]
    assert [v.name for v in plain_vars] == ["author", "commit_id", "order", "text"]
    assert len(q.where) == 7
    assert len(q.optionals) == 4
    assert q.order_by == ["commit_id", "order"]


def test_minimal_query():
    q = parse_query("SELECT ?x WHERE { ?x a rationale:Commit }")
    assert q.projection == [Variable("x")]
    assert q.where == [TriplePattern(Variable("x"), "a", "rationale:Commit")]
    assert q.optionals == []
    assert q.order_by == []


def test_filter_clause_is_unsupported():
    text = 'SELECT ?x WHERE { ?x a rationale:Commit . FILTER(?x > 3) }'
    with pytest.raises(UnsupportedFeatureError) as err:
        parse_query(text)
    assert err.value.token == "FILTER"


def test_syntax_error_carries_position():
    with pytest.raises(QuerySyntaxError) as err:
        parse_query("SELECT ?x WHERE { ?x a }")
    assert err.value.line >= 1
    assert err.value.column >= 1


def test_comments_and_whitespace_ignored():
    text = """
    # leading comment
    SELECT ?x    WHERE {
        ?x a rationale:Commit .   # trailing comment
    }
    """
    assert parse_query(text).where == [TriplePattern(Variable("x"), "a", "rationale:Commit")]


def test_order_by_unknown_variable_rejected():
    with pytest.raises(ValueError):
        parse_query("SELECT ?x WHERE { ?x a rationale:Commit } ORDER BY ?zzz")


def test_duplicate_aliases_rejected():
    text = (
        "SELECT (BOUND(?a) AS ?dup) (BOUND(?b) AS ?dup) "
        "WHERE { ?x a rationale:Commit }"
    )
    with pytest.raises(ValueError):
        parse_query(text)


# --- evaluation on the bundled fixture ---------------------------------------


def test_report_on_table_iv_graph():
    rows = builtin_rationale_report(table_iv_graph())
    assert len(rows) == 9
    assert [r["order"] for r in rows] == list(range(9))
    assert all(r["isCommitWithRationale"] is True for r in rows)
    rationale_rows = [r["order"] for r in rows if r["isSentenceRationale"]]
    assert rationale_rows == [1, 3, 7, 8]
    decision_rows = [r["order"] for r in rows if r["isSentenceDecision"]]
    assert decision_rows == [0, 6, 7]
    supporting_rows = [r["order"] for r in rows if r["isSentenceSupporting"]]
    assert supporting_rows == [1, 2, 3, 4, 5]


def test_report_on_empty_graph():
    assert builtin_rationale_report(KnowledgeGraph()) == []


def test_optional_free_query_equals_empty_optionals():
    g = table_iv_graph()
    base = parse_query("SELECT ?s WHERE { ?c baseV:contains ?s . ?s a rationale:RationaleSentence }")
    explicit = SelectQuery(projection=base.projection, where=base.where, optionals=[])
    assert evaluate(base, g) == evaluate(explicit, g)
    assert len(evaluate(base, g)) == 4


# --- oracle equivalence -----------------------------------------------------


def brute_force_join(patterns, triples):
    """Nested-loop join over the full triple list, no indexes."""

    def match(term, value, binding):
        if isinstance(term, Variable):
            if term.name in binding:
                return binding if binding[term.name] == value else None
            new = dict(binding)
            new[term.name] = value
            return new
        if term == value:
            return binding
        if isinstance(term, str) and isinstance(value, str) and ":" in term:
            return binding if term.split(":", 1)[1] == value else None
        return None

    rows = [{}]
    for pattern in patterns:
        next_rows = []
        for binding in rows:
            for s, p, o in triples:
                b = match(pattern.subject, s, binding)
                if b is None:
                    continue
                b = match(pattern.predicate, p, b)
                if b is None:
                    continue
                b = match(pattern.object, o, b)
                if b is not None:
                    next_rows.append(b)
        rows = next_rows
    return rows


def random_patterns(rng, g, n_patterns, shared_vars):
    triples = g.triples()
    patterns = []
    for i in range(n_patterns):
        s, p, o = rng.choice(triples)
        subject = Variable(shared_vars[0]) if rng.random() < 0.7 else s
        predicate = p if rng.random() < 0.8 else Variable(f"p{i}")
        obj = Variable(rng.choice(shared_vars)) if rng.random() < 0.5 else o
        patterns.append(TriplePattern(subject, predicate, obj))
    return patterns


def rows_as_set(rows):
    return {tuple(sorted((k, str(v)) for k, v in row.items())) for row in rows}


def test_random_conjunctive_queries_match_brute_force():
    rng = random.Random(23)
    for _ in range(15):
        g, _labels = random_graph(rng, max_commits=4, max_sentences=4)
        g = apply_inference(g)
        patterns = random_patterns(rng, g, rng.randint(1, 3), ["x", "y"])
        variables = sorted(
            {t.name for p in patterns for t in (p.subject, p.predicate, p.object) if isinstance(t, Variable)}
        )
        if not variables:
            continue
        q = SelectQuery(projection=[Variable(v) for v in variables], where=patterns)
        expected = brute_force_join(patterns, g.triples())
        projected = {
            tuple(sorted((v, str(b[v])) for v in variables if v in b)) for b in expected
        }
        assert rows_as_set(evaluate(q, g)) == projected


def test_optional_row_count_inequality():
    rng = random.Random(31)
    for _ in range(10):
        g, _labels = random_graph(rng, max_commits=4, max_sentences=4)
        g = apply_inference(g)
        mandatory = [TriplePattern(Variable("c"), "a", "Commit")]
        optional = [TriplePattern(Variable("c"), Variable("hr"), "CommitWithRationale")]
        with_optional = SelectQuery(
            projection=[Variable("c"), BoundTest("hr", "flag")],
            where=mandatory,
            optionals=[optional],
        )
        promoted = SelectQuery(
            projection=[Variable("c"), BoundTest("hr", "flag")],
            where=mandatory + optional,
        )
        outer = evaluate(with_optional, g)
        inner = evaluate(promoted, g)
        assert len(outer) >= len(inner)
        matched = [row for row in outer if row["flag"]]
        assert rows_as_set(matched) == rows_as_set(inner)


# --- ordering ---------------------------------------------------------------


def test_order_by_is_stable_permutation():
    g = table_iv_graph()
    unordered = SelectQuery(
        projection=[Variable("s"), Variable("o")],
        where=[
            TriplePattern(Variable("s"), "a", "Sentence"),
            TriplePattern(Variable("s"), "sentenceOrder", Variable("o")),
        ],
    )
    ordered = SelectQuery(
        projection=unordered.projection,
        where=unordered.where,
        order_by=["o"],
    )
    plain = evaluate(unordered, g)
    sorted_rows = evaluate(ordered, g)
    assert rows_as_set(plain) == rows_as_set(sorted_rows)
    assert [r["o"] for r in sorted_rows] == sorted(r["o"] for r in plain)


def test_integer_order_is_numeric_not_lexicographic():
    g, _labels = random_graph(random.Random(5), max_commits=2, max_sentences=15)
    g = apply_inference(g)
    q = SelectQuery(
        projection=[Variable("o")],
        where=[TriplePattern(Variable("s"), "sentenceOrder", Variable("o"))],
        order_by=["o"],
    )
    values = [r["o"] for r in evaluate(q, g)]
    assert values == sorted(values)
    if len(values) > 10:
        assert values.index(2) < values.index(10)
