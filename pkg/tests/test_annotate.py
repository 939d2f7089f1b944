import random

import pytest

from rationale_miner.annotate import (
    NO_CONSENSUS,
    Annotation,
    DegenerateAgreementError,
    InsufficientAnnotationsError,
    Label,
    RatingMatrix,
    binary_rating_matrix,
    consensus,
    fleiss_kappa,
    make_label_set,
    mean_kappa,
    per_label_kappa,
)


def annotation(annotator, labels, index=0, commit="c" * 40):
    return Annotation(annotator, commit, index, make_label_set(labels))


def oracle_fleiss(counts, n):
    """Straight transcription of the formula, independent of the implementation."""
    big_n = len(counts)
    p_bar = sum((sum(v * v for v in row) - n) / (n * (n - 1)) for row in counts) / big_n
    k = len(counts[0])
    p_j = [sum(row[j] for row in counts) / (big_n * n) for j in range(k)]
    pe = sum(p * p for p in p_j)
    return (p_bar - pe) / (1 - pe)


# --- label sets -------------------------------------------------------------


def test_label_set_rejects_empty():
    with pytest.raises(ValueError):
        make_label_set([])


def test_inapplicable_must_stand_alone():
    with pytest.raises(ValueError):
        make_label_set([Label.INAPPLICABLE, Label.DECISION])
    assert make_label_set([Label.INAPPLICABLE]) == frozenset({Label.INAPPLICABLE})


# --- consensus --------------------------------------------------------------


def test_unanimous_rationale():
    votes = [annotation(a, [Label.RATIONALE]) for a in "xyz"]
    assert consensus(votes) == frozenset({Label.RATIONALE})


def test_quorum_two_of_three():
    votes = [
        annotation("x", [Label.DECISION]),
        annotation("y", [Label.DECISION, Label.RATIONALE]),
        annotation("z", [Label.SUPPORTING_FACT]),
    ]
    assert consensus(votes) == frozenset({Label.DECISION})


def test_no_label_reaches_quorum():
    votes = [
        annotation("x", [Label.DECISION]),
        annotation("y", [Label.RATIONALE]),
        annotation("z", [Label.SUPPORTING_FACT]),
    ]
    assert consensus(votes) is NO_CONSENSUS


def test_inapplicable_quorum_wins():
    votes = [
        annotation("x", [Label.INAPPLICABLE]),
        annotation("y", [Label.INAPPLICABLE]),
        annotation("z", [Label.DECISION]),
    ]
    assert consensus(votes) == frozenset({Label.INAPPLICABLE})


def test_too_few_annotations():
    with pytest.raises(InsufficientAnnotationsError):
        consensus([annotation("x", [Label.DECISION])], quorum=2)


def test_consensus_order_invariant_and_duplicate_tolerant():
    votes = [
        annotation("x", [Label.DECISION]),
        annotation("y", [Label.DECISION]),
        annotation("z", [Label.RATIONALE]),
    ]
    shuffled = [votes[2], votes[0], votes[1], votes[0]]  # duplicate entry for x
    assert consensus(votes) == consensus(shuffled)


# --- fleiss kappa -----------------------------------------------------------


def test_perfect_agreement_kappa_one():
    m = RatingMatrix.from_rows([[3, 0], [0, 3], [3, 0]], n_raters=3)
    assert fleiss_kappa(m) == pytest.approx(1.0, abs=1e-12)


def test_two_items_full_agreement():
    m = RatingMatrix.from_rows([[3, 0], [0, 3]], n_raters=3)
    assert fleiss_kappa(m) == pytest.approx(1.0, abs=1e-12)


def test_frozen_hand_computed_value():
    # P_i = (1/3, 1/3, 1, 1) -> P_bar = 2/3; p_j = (1/2, 1/2) -> Pe = 1/2
    # kappa = (2/3 - 1/2) / (1/2) = 1/3
    m = RatingMatrix.from_rows([[2, 1], [1, 2], [3, 0], [0, 3]], n_raters=3)
    assert fleiss_kappa(m) == pytest.approx(1 / 3, abs=1e-9)


def test_degenerate_single_category():
    m = RatingMatrix.from_rows([[3, 0], [3, 0]], n_raters=3)
    with pytest.raises(DegenerateAgreementError):
        fleiss_kappa(m)


def test_matrix_validation():
    with pytest.raises(ValueError):
        RatingMatrix.from_rows([[2, 2]], n_raters=3)  # row sum mismatch
    with pytest.raises(ValueError):
        RatingMatrix.from_rows([[1, 1]], n_raters=1)  # single rater


def test_kappa_matches_oracle_and_permutation_invariance():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(2, 5)
        k = rng.randint(2, 4)
        rows = []
        for _ in range(rng.randint(2, 12)):
            row = [0] * k
            for _ in range(n):
                row[rng.randrange(k)] += 1
            rows.append(row)
        if all(sum(r[j] for r in rows) in (0, len(rows) * n) for j in range(k)):
            continue  # degenerate by construction
        m = RatingMatrix.from_rows(rows, n)
        expected = oracle_fleiss(rows, n)
        assert fleiss_kappa(m) == pytest.approx(expected, abs=1e-9)

        shuffled_items = rows[:]
        rng.shuffle(shuffled_items)
        cols = list(range(k))
        rng.shuffle(cols)
        permuted = [[row[j] for j in cols] for row in shuffled_items]
        assert fleiss_kappa(RatingMatrix.from_rows(permuted, n)) == pytest.approx(
            fleiss_kappa(m), abs=1e-12
        )


def test_two_rater_binary_matches_equal_marginal_cohen():
    # for n=2 raters, Fleiss kappa equals Cohen's kappa computed with pooled
    # (equal) marginals; brute-force both on random tables
    rng = random.Random(11)
    for _ in range(40):
        rows = []
        for _ in range(rng.randint(3, 15)):
            yes = rng.randint(0, 2)
            rows.append([yes, 2 - yes])
        col0 = sum(r[0] for r in rows)
        if col0 == 0 or col0 == 2 * len(rows):
            continue
        n_items = len(rows)
        p_observed = sum(1 for r in rows if r[0] in (0, 2)) / n_items
        share = col0 / (2 * n_items)
        p_chance = share * share + (1 - share) * (1 - share)
        expected = (p_observed - p_chance) / (1 - p_chance)
        m = RatingMatrix.from_rows(rows, 2)
        assert fleiss_kappa(m) == pytest.approx(expected, abs=1e-9)


# --- per-label kappa --------------------------------------------------------


def full_round(rng=None, n_sentences=10):
    rng = rng or random.Random(3)
    pool = [
        [Label.DECISION],
        [Label.RATIONALE],
        [Label.SUPPORTING_FACT],
        [Label.DECISION, Label.RATIONALE],
        [Label.SUPPORTING_FACT, Label.RATIONALE],
    ]
    return [
        annotation(annotator, rng.choice(pool), index=i)
        for i in range(n_sentences)
        for annotator in ("a", "b", "c")
    ]


def test_identical_annotators_give_kappa_one():
    votes = []
    choices = [[Label.DECISION], [Label.RATIONALE], [Label.SUPPORTING_FACT]]
    for i in range(6):
        for annotator in ("a", "b", "c"):
            votes.append(annotation(annotator, choices[i % 3], index=i))
    result = per_label_kappa(votes)
    assert set(result) == set((Label.DECISION, Label.RATIONALE, Label.SUPPORTING_FACT))
    for value in result.values():
        assert value == pytest.approx(1.0, abs=1e-12)
    assert mean_kappa(result) == pytest.approx(1.0, abs=1e-12)


def test_unused_label_is_degenerate():
    votes = []
    for i in range(4):
        for annotator in ("a", "b", "c"):
            votes.append(annotation(annotator, [Label.DECISION] if i % 2 else [Label.RATIONALE], index=i))
    with pytest.raises(DegenerateAgreementError) as err:
        per_label_kappa(votes)
    assert "SupportingFact" in str(err.value)


def test_per_label_matches_manual_binary_matrices():
    votes = full_round()
    result = per_label_kappa(votes)
    for label, value in result.items():
        m = binary_rating_matrix(votes, label)
        assert value == pytest.approx(oracle_fleiss([list(r) for r in m.counts], m.n_raters), abs=1e-9)


def test_uneven_rounds_rejected():
    votes = full_round()[:-1]  # drop one annotator from the last sentence
    with pytest.raises(ValueError):
        per_label_kappa(votes)


# --- corpus files -------------------------------------------------------------


def test_corpus_jsonl_round_trip(tmp_path):
    from rationale_miner.annotate import SentenceRecord, dump_corpus, load_corpus

    records = [
        SentenceRecord("a" * 40, 0, "replace the root bonus", make_label_set([Label.DECISION])),
        SentenceRecord(
            "a" * 40,
            1,
            "the old bonus was too big",
            make_label_set([Label.RATIONALE, Label.SUPPORTING_FACT]),
        ),
        SentenceRecord("a" * 40, 2, "] ]", make_label_set([Label.INAPPLICABLE])),
    ]
    path = tmp_path / "corpus.jsonl"
    dump_corpus(records, path)
    assert load_corpus(path) == records
