from __future__ import annotations

import random

import pytest

from gotta.evaluate import aggregate, evaluate_run, normalize_answer, score_example, token_f1

from oracles import counting_f1


def test_normalize_strips_articles_and_punctuation():
    assert normalize_answer("The 2010 FIFA World Cup!") == ["2010", "fifa", "world", "cup"]


def test_normalize_empty():
    assert normalize_answer("") == []


def test_normalize_abbreviation():
    assert normalize_answer("Manchester United F.C.") == ["manchester", "united", "fc"]


def test_f1_partial_overlap():
    # normalized pred [cat, sat]: P = 1.0, R = 2/3, F1 = 0.8
    assert token_f1("the cat sat", "cat sat down") == pytest.approx(0.8, abs=1e-12)


def test_f1_identity():
    assert token_f1("Spain", "Spain") == pytest.approx(1.0, abs=1e-12)


def test_f1_disjoint():
    assert token_f1("Football", "2010 FIFA World Cup") == pytest.approx(0.0, abs=1e-12)


def test_f1_both_empty_after_normalization():
    assert token_f1("the", "a an") == 1.0


def test_f1_one_empty():
    assert token_f1("", "Spain") == 0.0
    assert token_f1("Spain", "the") == 0.0


def test_f1_symmetry_randomized():
    rng = random.Random(3)
    vocab = ["cat", "sat", "down", "the", "2010", "cup", ""]
    for _ in range(1000):
        a = " ".join(rng.choices(vocab, k=rng.randint(0, 5)))
        b = " ".join(rng.choices(vocab, k=rng.randint(0, 5)))
        assert token_f1(a, b) == pytest.approx(token_f1(b, a), abs=1e-12)
        assert 0.0 <= token_f1(a, b) <= 1.0


def test_f1_matches_counting_oracle():
    rng = random.Random(17)
    vocab = ["cat", "sat", "mat", "dog", "ran", "far"]
    for _ in range(200):
        a_tokens = rng.choices(vocab, k=rng.randint(0, 6))
        b_tokens = rng.choices(vocab, k=rng.randint(0, 6))
        got = token_f1(" ".join(a_tokens), " ".join(b_tokens))
        assert got == pytest.approx(counting_f1(a_tokens, b_tokens), abs=1e-12)


def test_score_example_identity_member():
    assert score_example("Spain", ["Spain", "ESP"]) == 1.0


def test_score_example_max():
    assert score_example("cat sat", ["dog", "cat sat down"]) == pytest.approx(0.8, abs=1e-12)


def test_score_example_monotone_in_gold_set():
    rng = random.Random(23)
    vocab = ["cat", "sat", "mat", "dog"]
    for _ in range(1000):
        pred = " ".join(rng.choices(vocab, k=rng.randint(1, 4)))
        golds = [" ".join(rng.choices(vocab, k=rng.randint(1, 4))) for _ in range(3)]
        assert score_example(pred, golds + ["dog ran"]) >= score_example(pred, golds)


def test_score_example_empty_golds():
    with pytest.raises(ValueError):
        score_example("x", [])


def test_aggregate_single_run():
    report = aggregate([0.5])
    assert (report.mean_f1, report.std_f1) == (0.5, 0.0)


def test_aggregate_population_std():
    report = aggregate([0.4, 0.6])
    assert report.mean_f1 == pytest.approx(0.5, abs=1e-12)
    assert report.std_f1 == pytest.approx(0.1, abs=1e-12)


def test_aggregate_equal_runs_zero_std():
    report = aggregate([0.3, 0.3, 0.3])
    assert report.std_f1 == 0.0


def test_evaluate_run_scores_missing_prediction_zero():
    golds = {"q1": ["Spain"], "q2": ["Earth"]}
    report, missing = evaluate_run({"q1": "Spain"}, golds)
    assert missing == 1
    assert report.per_example["q1"] == 1.0
    assert report.per_example["q2"] == 0.0
    assert report.mean_f1 == pytest.approx(0.5)
    assert report.n == 2
