"""Acceptance gate: one test per release criterion, one printed verdict each.

Run with ``pytest tests/test_acceptance.py -v`` (add ``-s`` to see the
verdict lines). The throughput check builds a million-surface dictionary,
so this module is the slow part of the suite.
"""

from __future__ import annotations

import json
import random
import string
import time

import pytest

from gotta.augment import AugmentOptions, augment_dataset
from gotta.cli import main
from gotta.dataset import QAExample, sample_few_shot
from gotta.evaluate import score_example, token_f1
from gotta.gazetteer import Gazetteer, NormalizationOptions
from gotta.matcher import build_automaton, find_all

from conftest import gazetteer_of, mrqa_record, write_mrqa
from oracles import counting_f1, naive_find_all, naive_resolve


def verdict(ok: bool, name: str, detail: str = "") -> None:
    mark = "PASS" if ok else "FAIL"
    print(f"[{mark}] {name}" + (f" ({detail})" if detail else ""))
    assert ok, name


def test_criterion_matcher_oracle_suite():
    rng = random.Random(20240)
    alphabet = "abcd"
    started = time.perf_counter()
    for _ in range(1000):
        n_patterns = rng.randint(1, 50)
        surfaces = sorted(
            {"".join(rng.choices(alphabet, k=rng.randint(1, 6))) for _ in range(n_patterns)}
        )
        text = "".join(rng.choices(alphabet + " .", k=rng.randint(0, 200)))
        g = gazetteer_of(*surfaces, opts=NormalizationOptions(min_surface_chars=1))
        a = build_automaton(g)
        got = [(m.start, m.end, m.surface, m.entity_id) for m in find_all(a, text)]
        expected = naive_find_all({s: ids[0] for s, ids in g.surface_index.items()}, text)
        assert got == expected
    elapsed = time.perf_counter() - started
    verdict(elapsed < 10.0, "matcher oracle suite: 1000 random instances exact", f"{elapsed:.2f}s")


def test_criterion_classic_case():
    a = build_automaton(gazetteer_of("he", "she", "his", "hers"))
    got = {(m.surface, m.start, m.end) for m in find_all(a, "ushers")}
    ok = got == {("she", 1, 4), ("he", 2, 4), ("hers", 2, 6)}
    verdict(ok, "classic case: {he, she, his, hers} on 'ushers'", str(sorted(got)))


def _synthetic_corpus(n: int = 1000) -> tuple[list[QAExample], Gazetteer]:
    rng = random.Random(77)
    entities = [
        "Spain",
        "World Cup",
        "Earth",
        "Manchester United",
        "São Paulo",
        "Ωmega Point",
        "red planet",
    ]
    fillers = ["the", "rain", "fell", "over", "and", "под", "дождём", "valley", "团队", "trees"]
    examples = []
    for i in range(n):
        words = []
        for _ in range(rng.randint(4, 18)):
            if rng.random() < 0.3:
                words.append(rng.choice(entities))
            else:
                words.append(rng.choice(fillers))
        context = " ".join(words) + "."
        examples.append(
            QAExample(
                qid=f"q{i}",
                question=f"What about item {i}?",
                context=context,
                gold_answers=(rng.choice(entities),),
            )
        )
    return examples, gazetteer_of(*entities)


def test_criterion_mask_count_and_reconstruction_laws():
    examples, gazetteer = _synthetic_corpus(1000)
    automaton = build_automaton(gazetteer)
    result = augment_dataset(examples, automaton)
    mask = "<mask>"
    for p in result.ori_pairs:
        assert p.input_text.count(mask) == 1
        assert p.target_text.count(mask) == 0
    by_qid = {e.qid: e for e in examples}
    for p in result.aug_pairs:
        assert p.input_text.count(mask) == 2
        assert p.target_text.count(mask) == 1
        # reconstruction: splice the answer back over the context mask
        rebuilt = p.context.replace(mask, p.answer, 1)
        assert rebuilt == by_qid[p.source_qid].context
        raw = by_qid[p.source_qid].context.encode("utf-8")
        assert raw[p.span[0] : p.span[1]].decode("utf-8") == p.answer
    verdict(
        True,
        "mask-count and reconstruction laws over 1000-example corpus",
        f"{len(result.aug_pairs)} aug pairs checked",
    )


def test_criterion_count_law_independent_recount():
    examples, gazetteer = _synthetic_corpus(1000)
    automaton = build_automaton(gazetteer)
    result = augment_dataset(examples, automaton)
    surfaces = {s: ids[0] for s, ids in gazetteer.surface_index.items()}
    recount = sum(
        len(naive_resolve(naive_find_all(surfaces, e.context), e.context)) for e in examples
    )
    ok = len(result.aug_pairs) == recount == sum(result.span_counts.values())
    verdict(ok, "count law: one aug pair per retained span", f"{len(result.aug_pairs)} == {recount}")


def test_criterion_f1_metric():
    assert token_f1("the cat sat", "cat sat down") == pytest.approx(0.8, abs=1e-12)
    assert token_f1("Spain", "Spain") == pytest.approx(1.0, abs=1e-12)
    assert token_f1("Football", "2010 FIFA World Cup") == pytest.approx(0.0, abs=1e-12)

    rng = random.Random(55)
    vocab = ["cat", "sat", "mat", "dog", "ran", "far", "2010", "cup"]
    for _ in range(200):
        a_tokens = rng.choices(vocab, k=rng.randint(0, 6))
        b_tokens = rng.choices(vocab, k=rng.randint(0, 6))
        got = token_f1(" ".join(a_tokens), " ".join(b_tokens))
        assert got == pytest.approx(counting_f1(a_tokens, b_tokens), abs=1e-12)
    for _ in range(1000):
        a = " ".join(rng.choices(vocab, k=rng.randint(0, 5)))
        b = " ".join(rng.choices(vocab, k=rng.randint(0, 5)))
        assert token_f1(a, b) == pytest.approx(token_f1(b, a), abs=1e-12)
        golds = [" ".join(rng.choices(vocab, k=rng.randint(1, 4))) for _ in range(2)]
        assert score_example(a, golds + [b or "x"]) >= score_example(a, golds) - 1e-12
    verdict(True, "token F1: worked examples, oracle, symmetry, monotonicity")


def test_criterion_determinism(tmp_path):
    records = [
        mrqa_record(f"Spain met Earth in round {i}.", [(f"q{i}", "Who?", ["Spain"])])
        for i in range(25)
    ]
    train = write_mrqa(tmp_path / "train.jsonl", records)
    gaz = tmp_path / "gaz.tsv"
    gaz.write_text("Q1\tSpain\nQ2\tEarth\n", encoding="utf-8")

    outputs = []
    for name in ("a.jsonl", "b.jsonl"):
        out = tmp_path / name
        code = main(
            [
                "augment",
                "--train",
                str(train),
                "--gazetteer",
                str(gaz),
                "--seed",
                "3",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]

    examples = [
        QAExample(qid=f"q{i}", question="?", context="c", gold_answers=("a",)) for i in range(200)
    ]
    for seed in range(5):
        previous: tuple[str, ...] = ()
        for k in (16, 32, 64, 128):
            split = sample_few_shot(examples, k, seed)
            assert split.selected_qids[: len(previous)] == previous
            previous = split.selected_qids
    verdict(True, "determinism: byte-identical augment reruns, nested splits")


def test_criterion_throughput():
    rng = random.Random(12345)
    alphabet = string.ascii_lowercase + string.digits
    surfaces = set()
    while len(surfaces) < 1_000_000:
        surfaces.add("".join(rng.choices(alphabet, k=rng.randint(5, 12))))
    g = Gazetteer(normalization=NormalizationOptions())
    g.surface_index = {s: ["E"] for s in sorted(surfaces)}
    automaton = build_automaton(g)

    words = ["".join(rng.choices(alphabet, k=rng.randint(3, 10))) for _ in range(200_000)]
    chunks: list[str] = []
    size = 0
    while size < 10 * 1024 * 1024:
        w = words[rng.randrange(len(words))]
        chunks.append(w)
        size += len(w) + 1
    text = " ".join(chunks)

    started = time.perf_counter()
    matches = find_all(automaton, text)
    elapsed = time.perf_counter() - started
    verdict(
        elapsed < 30.0,
        "throughput: 1M-surface gazetteer over 10 MB of text",
        f"{elapsed:.1f}s, {len(matches)} matches",
    )
