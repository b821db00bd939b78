from __future__ import annotations

import gzip
import json
from pathlib import Path

import pytest

from gotta.gazetteer import EntityRecord, Gazetteer, NormalizationOptions, normalize_surface


def gazetteer_of(*surfaces: str, opts: NormalizationOptions | None = None) -> Gazetteer:
    """In-memory gazetteer with ids E0, E1, ... in surface order."""
    opts = opts or NormalizationOptions()
    g = Gazetteer(normalization=opts)
    for i, s in enumerate(surfaces):
        ns = normalize_surface(s, opts)
        g.records.append(EntityRecord(entity_id=f"E{i}", surface=ns))
        g.surface_index.setdefault(ns, []).append(f"E{i}")
    return g


def write_mrqa(path: Path, records: list[dict], compress: bool = False) -> Path:
    lines = [json.dumps({"header": {"dataset": "synthetic"}})]
    lines.extend(json.dumps(r) for r in records)
    data = ("\n".join(lines) + "\n").encode("utf-8")
    if compress:
        path.write_bytes(gzip.compress(data))
    else:
        path.write_bytes(data)
    return path


def mrqa_record(context: str, qas: list[tuple[str, str, list[str]]]) -> dict:
    """Record with qas given as (qid, question, answers); detected answer
    spans are derived from the first occurrence of each answer."""
    out_qas = []
    for qid, question, answers in qas:
        detected = []
        pos = context.find(answers[0])
        if pos >= 0:
            detected.append({"text": answers[0], "char_spans": [[pos, pos + len(answers[0]) - 1]]})
        out_qas.append(
            {"qid": qid, "question": question, "answers": answers, "detected_answers": detected}
        )
    return {"context": context, "qas": out_qas}


@pytest.fixture
def tiny_gazetteer_file(tmp_path: Path) -> Path:
    path = tmp_path / "gazetteer.tsv"
    path.write_text(
        "# synthetic entity dictionary\n"
        "Q1\tSpain\n"
        "Q2\tEarth\n"
        "Q3\tManchester United\n"
        "Q4\tUnited\n"
        "Q5\tWorld Cup\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture
def tiny_mrqa_file(tmp_path: Path) -> Path:
    records = [
        mrqa_record(
            "Spain won the World Cup. Earth kept spinning.",
            [
                ("q1", "Who won?", ["Spain"]),
                ("q2", "What kept spinning?", ["Earth", "the Earth"]),
            ],
        ),
        mrqa_record(
            "Manchester United drew at home.",
            [("q3", "Who drew?", ["Manchester United"])],
        ),
        mrqa_record(
            "Nothing notable happened here.",
            [("q4", "What happened?", ["nothing"])],
        ),
    ]
    return write_mrqa(tmp_path / "train.jsonl", records)
