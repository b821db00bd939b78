"""Cloze construction and unified prompt rendering.

Every training sample, original or augmented, is rendered into the same
three-segment string:

    input:  Question: <q> Answer: <mask> Context: <c>
    target: Question: <q> Answer: <a> Context: <c>

For augmented samples the question is the fixed cloze question, the
context has the selected entity occurrence replaced by the mask token,
and the answer is the masked entity text. So an augmented input carries
exactly two mask tokens (answer slot + masked context) and its target
keeps the context mask in place.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from gotta.dataset import QAExample, SplitMix64
from gotta.matcher import EntitySpan, MatchAutomaton, find_all, resolve_spans

logger = logging.getLogger(__name__)

DEFAULT_MASK_TOKEN = "<mask>"
CLOZE_QUESTION = "What is the masked entity?"
CLOZE_QUESTION_SHORT = "What?"

TEMPLATE_KINDS = ("gotta", "what", "random")


@dataclass(frozen=True)
class ClozeExample:
    source_qid: str
    span: EntitySpan
    masked_context: str
    answer_surface: str
    template_kind: str = "gotta"


@dataclass(frozen=True)
class PromptPair:
    """One rendered (input, target) string pair, QA or cloze."""

    kind: str  # "ori" | "aug"
    input_text: str
    target_text: str
    source_qid: str
    template_kind: str
    question: str
    answer: str
    context: str
    span: tuple[int, int] | None = None
    entity_id: str | None = None

    @property
    def pair_id(self) -> str:
        if self.kind == "ori":
            return f"{self.source_qid}::ori"
        return f"{self.source_qid}::aug::{self.span[0]}-{self.span[1]}"

    def to_dict(self) -> dict:
        return {
            "id": self.pair_id,
            "kind": self.kind,
            "template": self.template_kind,
            "input": self.input_text,
            "target": self.target_text,
            "question": self.question,
            "answer": self.answer,
            "context": self.context,
            "span": {"start": self.span[0], "end": self.span[1]} if self.span else None,
            "entity_id": self.entity_id,
            "source_qid": self.source_qid,
        }


@dataclass(frozen=True)
class AugmentOptions:
    mask_token: str = DEFAULT_MASK_TOKEN
    template_kind: str = "gotta"
    separator: str = " "
    seed: int = 0
    exclude_answer_overlap: bool = False
    mask_all_occurrences: bool = False
    target_original_context: bool = False
    random_span_count: int = 2
    random_span_length: tuple[int, int] = (1, 3)

    def to_dict(self) -> dict:
        return {
            "mask_token": self.mask_token,
            "template_kind": self.template_kind,
            "separator": self.separator,
            "seed": self.seed,
            "exclude_answer_overlap": self.exclude_answer_overlap,
            "mask_all_occurrences": self.mask_all_occurrences,
            "target_original_context": self.target_original_context,
            "random_span_count": self.random_span_count,
            "random_span_length": list(self.random_span_length),
        }


@dataclass
class AugmentedSet:
    ori_pairs: list[PromptPair] = field(default_factory=list)
    aug_pairs: list[PromptPair] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    span_counts: dict[str, int] = field(default_factory=dict)


def _render(question: str, answer_slot: str, context: str, sep: str) -> str:
    return f"Question: {question}{sep}Answer: {answer_slot}{sep}Context: {context}"


def render_qa_prompt(
    e: QAExample, mask_token: str = DEFAULT_MASK_TOKEN, separator: str = " "
) -> PromptPair:
    """Render an original QA sample; the first gold answer is the target."""
    answer = e.gold_answers[0]
    return PromptPair(
        kind="ori",
        input_text=_render(e.question, mask_token, e.context, separator),
        target_text=_render(e.question, answer, e.context, separator),
        source_qid=e.qid,
        template_kind="gotta",
        question=e.question,
        answer=answer,
        context=e.context,
    )


def make_cloze(
    e: QAExample,
    span: EntitySpan,
    mask_token: str = DEFAULT_MASK_TOKEN,
    mask_all_occurrences: bool = False,
    template_kind: str = "gotta",
) -> ClozeExample:
    """Mask the selected span (byte offsets) out of the example's context.

    Only the selected occurrence is masked by default; other occurrences of
    the same surface stay. Splicing the answer back over the mask token
    reproduces the source context byte for byte, which requires the mask
    literal not to occur in the context already.
    """
    raw = e.context.encode("utf-8")
    if not (0 <= span.start < span.end <= len(raw)):
        raise ValueError(f"span [{span.start}, {span.end}) out of bounds for context of {len(raw)} bytes")
    if mask_token in e.context:
        raise ValueError(f"context already contains the mask token {mask_token!r}; masking would not round-trip")
    answer_surface = raw[span.start : span.end].decode("utf-8")
    mask_bytes = mask_token.encode("utf-8")
    if mask_all_occurrences:
        masked = raw.replace(raw[span.start : span.end], mask_bytes)
    else:
        masked = raw[: span.start] + mask_bytes + raw[span.end :]
    return ClozeExample(
        source_qid=e.qid,
        span=span,
        masked_context=masked.decode("utf-8"),
        answer_surface=answer_surface,
        template_kind=template_kind,
    )


def render_cloze_prompt(
    cz: ClozeExample,
    mask_token: str = DEFAULT_MASK_TOKEN,
    template_kind: str | None = None,
    separator: str = " ",
    target_original_context: bool = False,
    original_context: str | None = None,
) -> PromptPair:
    """Render a cloze sample with the fixed cloze question.

    template_kind "what" swaps the question for the short variant; "random"
    keeps the standard question (the ablation changes which spans are
    masked, not the wording).
    """
    kind = template_kind or cz.template_kind
    if kind not in TEMPLATE_KINDS:
        raise ValueError(f"unknown template kind {kind!r}")
    question = CLOZE_QUESTION_SHORT if kind == "what" else CLOZE_QUESTION
    target_context = cz.masked_context
    if target_original_context:
        if original_context is None:
            raise ValueError("target_original_context requires the original context")
        target_context = original_context
    return PromptPair(
        kind="aug",
        input_text=_render(question, mask_token, cz.masked_context, separator),
        target_text=_render(question, cz.answer_surface, target_context, separator),
        source_qid=cz.source_qid,
        template_kind=kind,
        question=question,
        answer=cz.answer_surface,
        context=cz.masked_context,
        span=(cz.span.start, cz.span.end),
        entity_id=cz.span.entity_id,
    )


def _token_byte_spans(context: str) -> list[tuple[int, int]]:
    """Byte spans of whitespace-separated tokens, in order."""
    spans: list[tuple[int, int]] = []
    offset = 0
    start: int | None = None
    for ch in context:
        width = len(ch.encode("utf-8"))
        if ch.isspace():
            if start is not None:
                spans.append((start, offset))
                start = None
        elif start is None:
            start = offset
        offset += width
    if start is not None:
        spans.append((start, offset))
    return spans


def random_spans(
    e: QAExample,
    seed: int,
    count: int,
    length_range: tuple[int, int] = (1, 3),
) -> list[EntitySpan]:
    """Sample non-overlapping whitespace-token-aligned spans uniformly.

    Used by the random-masking ablation in place of matcher output. Span
    lengths (in tokens) are uniform in ``length_range``; placement is
    uniform over valid start tokens. Rejected draws (overlap or length
    beyond the token count) are simply retried, and sampling stops after
    16 * count attempts, so a crowded or short context yields fewer spans,
    never overlapping ones.
    """
    lo, hi = length_range
    if lo < 1 or hi < lo:
        raise ValueError(f"bad length range {length_range}")
    tokens = _token_byte_spans(e.context)
    n = len(tokens)
    if n == 0 or count <= 0 or lo > n:
        return []
    rng = SplitMix64(seed)
    taken: list[tuple[int, int]] = []  # chosen token index ranges [t, t+L)
    results: list[EntitySpan] = []
    raw = e.context.encode("utf-8")
    attempts = 0
    while len(results) < count and attempts < 16 * count:
        attempts += 1
        length = lo + rng.below(hi - lo + 1)
        if length > n:
            continue
        t = rng.below(n - length + 1)
        if any(t < b and a < t + length for a, b in taken):
            continue
        taken.append((t, t + length))
        start = tokens[t][0]
        end = tokens[t + length - 1][1]
        results.append(
            EntitySpan(
                start=start,
                end=end,
                surface=raw[start:end].decode("utf-8"),
                entity_id=None,
                retained=True,
            )
        )
    results.sort(key=lambda s: s.start)
    return results


def _spans_for_example(
    e: QAExample, automaton: MatchAutomaton | None, options: AugmentOptions
) -> list[EntitySpan]:
    if options.template_kind == "random":
        # Stream the example's own sub-seed off the run seed so span draws
        # do not depend on corpus order.
        sub_seed = SplitMix64(options.seed ^ _stable_hash(e.qid)).next_u64()
        return random_spans(
            e, sub_seed, options.random_span_count, options.random_span_length
        )
    if automaton is None:
        raise ValueError("entity templates need a built automaton")
    spans = resolve_spans(find_all(automaton, e.context), e.context)
    if options.exclude_answer_overlap and e.answer_char_spans:
        spans = [
            s
            for s in spans
            if not any(s.start < b and a < s.end for a, b in e.answer_char_spans)
        ]
    return spans


def _stable_hash(s: str) -> int:
    """64-bit FNV-1a, stable across processes (unlike builtin hash)."""
    h = 0xCBF29CE484222325
    for b in s.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & ((1 << 64) - 1)
    return h


def augment_dataset(
    examples: list[QAExample],
    automaton: MatchAutomaton | None,
    options: AugmentOptions | None = None,
    workers: int = 1,
) -> AugmentedSet:
    """Build the full training set: one ori pair per example plus one aug
    pair per retained entity span (or per random span under the random
    template). Output order is deterministic: source order, then span start.

    Per-example span tagging is pure, so with ``workers`` > 1 it runs on a
    thread pool; results are merged back in input order, keeping the output
    canonical regardless of scheduling.
    """
    options = options or AugmentOptions()
    result = AugmentedSet(
        provenance={
            "gazetteer_hash": automaton.content_hash if automaton else None,
            "options": options.to_dict(),
        }
    )
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            all_spans = list(
                pool.map(lambda e: _spans_for_example(e, automaton, options), examples)
            )
    else:
        all_spans = [_spans_for_example(e, automaton, options) for e in examples]

    for e, spans in zip(examples, all_spans):
        result.ori_pairs.append(
            render_qa_prompt(e, options.mask_token, options.separator)
        )
        result.span_counts[e.qid] = len(spans)
        for span in spans:
            cz = make_cloze(
                e,
                span,
                options.mask_token,
                options.mask_all_occurrences,
                options.template_kind,
            )
            result.aug_pairs.append(
                render_cloze_prompt(
                    cz,
                    options.mask_token,
                    options.template_kind,
                    options.separator,
                    options.target_original_context,
                    e.context,
                )
            )
    return result
