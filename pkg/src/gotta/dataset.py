"""MRQA-format QA data ingestion and deterministic few-shot splits.

Few-shot splits follow the logarithmic size ladder {16, 32, 64, 128} (any
positive k is accepted) and are reproducible across implementations and
languages: selection is a partial Fisher-Yates shuffle driven by a
SplitMix64 stream seeded with the split seed. Because the per-step draws
depend only on the population size, splits for the same seed are nested:
the size-16 selection is a prefix of the size-32 selection.
"""

from __future__ import annotations

import gzip
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1

# Seeds used when replicating an experiment several times.
DEFAULT_SEEDS = (0, 1, 2, 3, 4)


class SplitMix64:
    """The SplitMix64 generator (Vigna), 64-bit state, 64-bit output.

    Chosen because it is trivially portable: ~10 lines in any language,
    no vector state, and good enough statistically for subsampling.
    """

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform-ish draw in [0, bound). Modulo bias is negligible for
        bound << 2^64 and keeping the rule this simple makes the stream
        easy to reproduce elsewhere."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        return self.next_u64() % bound


@dataclass(frozen=True)
class QAExample:
    """One (question, context) training sample with its gold answers."""

    qid: str
    question: str
    context: str
    gold_answers: tuple[str, ...]
    answer_char_spans: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class FewShotSplit:
    source_size: int
    k: int
    seed: int
    selected_qids: tuple[str, ...]


def _open_maybe_gzip(path: Path):
    with open(path, "rb") as probe:
        magic = probe.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def _byte_span(context: str, char_start: int, char_end_incl: int) -> tuple[int, int] | None:
    """Convert an inclusive character span to byte offsets, or None if out
    of bounds."""
    if char_start < 0 or char_end_incl < char_start or char_end_incl >= len(context):
        return None
    start = len(context[:char_start].encode("utf-8"))
    end = start + len(context[char_start : char_end_incl + 1].encode("utf-8"))
    return (start, end)


def load_mrqa(path: str | Path) -> list[QAExample]:
    """Load an MRQA JSON-lines file (gzip detected by magic bytes).

    The first line must be a header object; each following line holds one
    context with its ``qas``. A context with several questions yields one
    QAExample per question, sharing the context string. Records missing
    context/question/answers are skipped with a warning; detected answer
    spans whose text does not equal the context slice are dropped with a
    warning but the example is kept.
    """
    path = Path(path)
    examples: list[QAExample] = []
    skipped = 0
    dropped_spans = 0

    with _open_maybe_gzip(path) as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise ValueError(f"{path}: missing header")
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: missing header ({exc})") from exc
        if not isinstance(header, dict) or "header" not in header:
            raise ValueError(f"{path}: missing header")

        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            record = json.loads(line)
            context = record.get("context")
            qas = record.get("qas")
            if not context or not isinstance(qas, list):
                logger.warning("%s:%d: record missing context or qas, skipped", path, lineno)
                skipped += 1
                continue
            for qa in qas:
                qid = qa.get("qid") or qa.get("id")
                question = qa.get("question")
                answers = qa.get("answers")
                if not qid or question is None or not answers:
                    logger.warning("%s:%d: qa missing qid/question/answers, skipped", path, lineno)
                    skipped += 1
                    continue
                spans: list[tuple[int, int]] = []
                for det in qa.get("detected_answers") or []:
                    text = det.get("text", "")
                    for char_span in det.get("char_spans") or []:
                        span = _byte_span(context, char_span[0], char_span[1])
                        if span is None or context[char_span[0] : char_span[1] + 1] != text:
                            logger.warning(
                                "%s:%d: detected answer span mismatch for %s, span dropped",
                                path,
                                lineno,
                                qid,
                            )
                            dropped_spans += 1
                            continue
                        spans.append(span)
                examples.append(
                    QAExample(
                        qid=str(qid),
                        question=str(question),
                        context=context,
                        gold_answers=tuple(str(a) for a in answers),
                        answer_char_spans=tuple(spans),
                    )
                )

    if skipped or dropped_spans:
        logger.warning(
            "%s: %d records skipped, %d answer spans dropped", path, skipped, dropped_spans
        )
    logger.info("%s: loaded %d examples", path, len(examples))
    return examples


def sample_few_shot(examples: list[QAExample], k: int, seed: int) -> FewShotSplit:
    """Uniform sample of min(k, n) examples without replacement.

    Partial Fisher-Yates over the example indices, randomness from a
    SplitMix64 stream seeded with ``seed``. Output order is selection
    order, which is what makes splits nested across k for a fixed seed.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = len(examples)
    take = min(k, n)
    rng = SplitMix64(seed)
    idx = list(range(n))
    for i in range(take):
        j = i + rng.below(n - i)
        idx[i], idx[j] = idx[j], idx[i]
    return FewShotSplit(
        source_size=n,
        k=k,
        seed=seed,
        selected_qids=tuple(examples[i].qid for i in idx[:take]),
    )
