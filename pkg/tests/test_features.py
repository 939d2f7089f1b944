import math
import random

import pytest

from rationale_miner.features import (
    EmptyVocabularyError,
    TfIdfModel,
    fit_tfidf,
    tokenize,
    transform,
)


def oracle_idf(corpus):
    """Independent direct-formula computation of df and idf."""
    import re

    token = re.compile(r"[a-z0-9_]\w*", re.UNICODE)

    def toks(text):
        return [t for t in token.findall(text.lower()) if len(t) >= 2]

    docs = [set(toks(d)) for d in corpus]
    terms = sorted(set().union(*docs)) if docs else []
    n = len(corpus)
    df = {t: sum(1 for d in docs if t in d) for t in terms}
    idf = {t: math.log((1 + n) / (1 + df[t])) + 1.0 for t in terms}
    return terms, df, idf


def oracle_vector(corpus_terms, idf, text):
    import collections
    import re

    token = re.compile(r"[a-z0-9_]\w*", re.UNICODE)
    counts = collections.Counter(
        t for t in token.findall(text.lower()) if len(t) >= 2 and t in idf
    )
    raw = {t: c * idf[t] for t, c in counts.items()}
    norm = math.sqrt(sum(v * v for v in raw.values()))
    if norm > 0:
        raw = {t: v / norm for t, v in raw.items()}
    return {corpus_terms.index(t): v for t, v in raw.items()}


# --- tokenize ---------------------------------------------------------------


def test_tokenize_lowercases_and_splits():
    assert tokenize("OOM killer") == ["oom", "killer"]


def test_tokenize_drops_short_runs():
    assert tokenize("a 3% bonus") == ["bonus"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_underscores_and_digits():
    assert tokenize("oom_kill.c badness2") == ["oom_kill", "badness2"]


# --- fit --------------------------------------------------------------------


def test_fit_two_doc_example():
    model = fit_tfidf(["aa bb", "aa"])
    vocab = model.vocabulary
    assert vocab.terms == ("aa", "bb")
    assert vocab.df == (2, 1)
    assert model.idf[0] == pytest.approx(1.0, abs=1e-9)  # ln(3/3)+1
    assert model.idf[1] == pytest.approx(math.log(3 / 2) + 1, abs=1e-9)


def test_single_doc_idf_is_one():
    model = fit_tfidf(["one two three"])
    assert all(v == pytest.approx(1.0, abs=1e-12) for v in model.idf)


def test_fit_rejects_tokenless_corpus():
    with pytest.raises(EmptyVocabularyError):
        fit_tfidf(["!!", "??"])


def test_fit_rejects_empty_corpus():
    with pytest.raises(ValueError):
        fit_tfidf([])


def test_fit_is_corpus_order_invariant():
    docs = ["memory pressure", "oom killer badness", "killer memory"]
    a = fit_tfidf(docs)
    b = fit_tfidf(list(reversed(docs)))
    assert a.vocabulary == b.vocabulary
    assert a.idf == b.idf


# --- transform --------------------------------------------------------------


def test_out_of_vocabulary_text_gives_zero_vector():
    model = fit_tfidf(["aa bb", "aa"])
    vec = model.transform("zz yy")
    assert vec.weights == {}
    assert vec.norm() == 0.0


def test_transform_matches_hand_formula():
    model = fit_tfidf(["aa bb", "aa"])
    vec = model.transform("aa aa bb")
    idf_bb = math.log(3 / 2) + 1
    norm = math.sqrt(4.0 + idf_bb * idf_bb)
    assert vec.weights[0] == pytest.approx(2.0 / norm, abs=1e-9)
    assert vec.weights[1] == pytest.approx(idf_bb / norm, abs=1e-9)


def test_training_docs_produce_unit_vectors():
    corpus = ["memory pressure rises", "oom killer fires", "killer selects task"]
    model = fit_tfidf(corpus)
    for doc in corpus:
        assert abs(transform(model, doc).norm() - 1.0) < 1e-12


def test_random_corpora_match_oracle():
    rng = random.Random(5)
    words = ["alpha", "beta", "gamma", "delta", "oom", "kill", "task", "x1", "y2"]
    for _ in range(10):
        corpus = [
            " ".join(rng.choice(words) for _ in range(rng.randint(1, 12)))
            for _ in range(rng.randint(1, 15))
        ]
        model = fit_tfidf(corpus)
        terms, df, idf = oracle_idf(corpus)
        assert list(model.vocabulary.terms) == terms
        for i, term in enumerate(terms):
            assert model.vocabulary.df[i] == df[term]
            assert model.idf[i] == pytest.approx(idf[term], abs=1e-9)
        probe = " ".join(rng.choice(words) for _ in range(6))
        vec = model.transform(probe)
        expected = oracle_vector(terms, idf, probe)
        assert set(vec.weights) == set(expected)
        for col, value in expected.items():
            assert vec.weights[col] == pytest.approx(value, abs=1e-9)


# --- serialization ----------------------------------------------------------


def test_round_trip_preserves_idf_and_vectors():
    model = fit_tfidf(["aa bb cc", "aa cc", "bb"])
    clone = TfIdfModel.from_dict(model.to_dict())
    assert clone.idf == model.idf
    assert clone.transform("aa bb zz").weights == model.transform("aa bb zz").weights
