"""Bag-of-words token F1 over normalized answers, max over gold references.

Normalization is the standard SQuAD recipe: lowercase, strip punctuation,
drop English articles, split on whitespace. The overlap is a multiset
(Counter) intersection, so repeated tokens count with multiplicity.
"""

from __future__ import annotations

import string
from collections import Counter
from dataclasses import dataclass, field
from math import sqrt

_PUNCT = set(string.punctuation)
_ARTICLES = {"a", "an", "the"}


@dataclass
class EvalReport:
    """Scores for one run, or the mean/std of run means when aggregating.

    ``std_f1`` is the population standard deviation. ``n`` counts examples
    for a single run and runs for an aggregate.
    """

    per_example: dict[str, float] = field(default_factory=dict)
    mean_f1: float = 0.0
    std_f1: float = 0.0
    n: int = 0

    def to_dict(self) -> dict:
        return {
            "per_example": self.per_example,
            "mean_f1": self.mean_f1,
            "std_f1": self.std_f1,
            "n": self.n,
        }


def normalize_answer(s: str) -> list[str]:
    """Lowercase, strip punctuation, remove articles, split on whitespace."""
    lowered = s.lower()
    no_punct = "".join(ch for ch in lowered if ch not in _PUNCT)
    return [tok for tok in no_punct.split() if tok not in _ARTICLES]


def token_f1(pred: str, gold: str) -> float:
    """Multiset-overlap F1 between the normalized token bags.

    Both bags empty scores 1.0 (the prediction of nothing is exactly
    right); exactly one empty scores 0.0.
    """
    pred_tokens = normalize_answer(pred)
    gold_tokens = normalize_answer(gold)
    if not pred_tokens and not gold_tokens:
        return 1.0
    if not pred_tokens or not gold_tokens:
        return 0.0
    overlap = sum((Counter(pred_tokens) & Counter(gold_tokens)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred_tokens)
    recall = overlap / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def score_example(pred: str, golds: list[str] | tuple[str, ...]) -> float:
    """Best token F1 of ``pred`` against any gold reference."""
    if not golds:
        raise ValueError("golds must be non-empty")
    return max(token_f1(pred, gold) for gold in golds)


def evaluate_run(
    predictions: dict[str, str], golds: dict[str, list[str] | tuple[str, ...]]
) -> tuple[EvalReport, int]:
    """Score one prediction run against gold answers keyed by qid.

    A qid absent from ``predictions`` is scored 0 (an absent answer is a
    wrong answer, not an error); the count of such misses is returned
    alongside the report.
    """
    per_example: dict[str, float] = {}
    missing = 0
    for qid, gold in golds.items():
        if qid in predictions:
            per_example[qid] = score_example(predictions[qid], list(gold))
        else:
            per_example[qid] = 0.0
            missing += 1
    n = len(per_example)
    mean = sum(per_example.values()) / n if n else 0.0
    return EvalReport(per_example=per_example, mean_f1=mean, std_f1=0.0, n=n), missing


def aggregate(runs: list[EvalReport] | list[float]) -> EvalReport:
    """Mean and population std of per-run mean F1 across seeds."""
    if not runs:
        raise ValueError("need at least one run to aggregate")
    means = [r.mean_f1 if isinstance(r, EvalReport) else float(r) for r in runs]
    n = len(means)
    mean = sum(means) / n
    variance = sum((m - mean) ** 2 for m in means) / n
    return EvalReport(per_example={}, mean_f1=mean, std_f1=sqrt(variance), n=n)
