"""Entity-aware cloze augmentation toolkit for few-shot QA training sets.

The pipeline: load an entity gazetteer, compile it into a multi-pattern
matcher, tag entity spans in QA contexts, turn each retained span into a
cloze training sample rendered in the same prompt format as the QA task,
and score predictions with bag-of-words token F1.
"""

from gotta.gazetteer import (
    EntityRecord,
    Gazetteer,
    NormalizationOptions,
    load_gazetteer,
    normalize_surface,
)
from gotta.matcher import (
    EntitySpan,
    MatchAutomaton,
    RawMatch,
    build_automaton,
    find_all,
    resolve_spans,
)
from gotta.dataset import (
    FewShotSplit,
    QAExample,
    SplitMix64,
    load_mrqa,
    sample_few_shot,
)
from gotta.augment import (
    AugmentOptions,
    AugmentedSet,
    ClozeExample,
    PromptPair,
    augment_dataset,
    make_cloze,
    random_spans,
    render_cloze_prompt,
    render_qa_prompt,
)
from gotta.evaluate import (
    EvalReport,
    aggregate,
    evaluate_run,
    normalize_answer,
    score_example,
    token_f1,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentOptions",
    "AugmentedSet",
    "ClozeExample",
    "EntityRecord",
    "EntitySpan",
    "EvalReport",
    "FewShotSplit",
    "Gazetteer",
    "MatchAutomaton",
    "NormalizationOptions",
    "PromptPair",
    "QAExample",
    "RawMatch",
    "SplitMix64",
    "aggregate",
    "augment_dataset",
    "build_automaton",
    "evaluate_run",
    "find_all",
    "load_gazetteer",
    "load_mrqa",
    "make_cloze",
    "normalize_answer",
    "normalize_surface",
    "random_spans",
    "render_cloze_prompt",
    "render_qa_prompt",
    "resolve_spans",
    "sample_few_shot",
    "score_example",
    "token_f1",
]
