"""Command-line surface: sample, augment, eval, stats.

Every command writes a ``<output>.meta.json`` sidecar holding the resolved
configuration and SHA-256 hashes of all input files, so any output can be
traced back to exact inputs. Nothing written here carries timestamps:
identical inputs and config produce byte-identical outputs.

Exit codes: 0 success, 1 runtime failure, 2 usage error. A config file of
``key=value`` lines may supply defaults; explicit flags win. The
``GOTTA_THREADS`` environment variable caps worker parallelism for the
augment scan.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

from gotta.augment import (
    DEFAULT_MASK_TOKEN,
    TEMPLATE_KINDS,
    AugmentOptions,
    augment_dataset,
)
from gotta.dataset import load_mrqa, sample_few_shot
from gotta.evaluate import aggregate, evaluate_run
from gotta.gazetteer import NormalizationOptions, load_gazetteer
from gotta.matcher import build_automaton

logger = logging.getLogger(__name__)

USAGE_ERROR = 2


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class UsageError(Exception):
    pass


def _require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{what} not found: {p}")
    return p


def _read_config_file(path: Path) -> dict[str, str]:
    config: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        config[key.strip()] = value.strip()
    return config


def _apply_config_defaults(args: argparse.Namespace) -> None:
    """Fill unset options from the --config file; explicit flags win because
    unset options are still at their None sentinel defaults."""
    if not getattr(args, "config", None):
        return
    config = _read_config_file(_require_file(args.config, "config file"))
    for key, value in config.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, _COERCERS.get(attr, str)(value))


_COERCERS = {
    "k": int,
    "seed": int,
    "min_surface_chars": int,
    "random_span_count": int,
    "case_fold": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "exclude_answer_overlap": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "mask_all_occurrences": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "per_example": lambda v: v.lower() in ("1", "true", "yes", "on"),
}


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def _write_sidecar(out_path: Path, config: dict, inputs: dict[str, Path], extra: dict | None = None) -> None:
    payload = {
        "config": config,
        "inputs": {name: {"path": str(p), "sha256": _sha256(p)} for name, p in inputs.items()},
    }
    if extra:
        payload.update(extra)
    _write_json(Path(str(out_path) + ".meta.json"), payload)


def _worker_count() -> int:
    raw = os.environ.get("GOTTA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("ignoring non-integer GOTTA_THREADS=%r", raw)
        return 1


def cmd_sample(args: argparse.Namespace) -> int:
    train = _require_file(args.train, "training file")
    if args.k is None:
        raise UsageError("--k is required (via flag or config)")
    if args.k < 1:
        raise UsageError(f"--k must be >= 1, got {args.k}")
    seed = args.seed if args.seed is not None else 0
    examples = load_mrqa(train)
    split = sample_few_shot(examples, args.k, seed)
    dataset_name = args.dataset or train.name.split(".")[0]
    manifest = {
        "dataset": dataset_name,
        "k": split.k,
        "seed": split.seed,
        "qids": list(split.selected_qids),
    }
    out = Path(args.out)
    _write_json(out, manifest)
    _write_sidecar(
        out,
        config={"command": "sample", "dataset": dataset_name, "k": args.k, "seed": seed},
        inputs={"train": train},
    )
    print(f"wrote split of {len(split.selected_qids)} qids to {out}")
    return 0


def _resolved_augment_options(args: argparse.Namespace) -> AugmentOptions:
    template = args.template or "gotta"
    if template not in TEMPLATE_KINDS:
        raise UsageError(f"--template must be one of {', '.join(TEMPLATE_KINDS)}")
    return AugmentOptions(
        mask_token=args.mask_token or DEFAULT_MASK_TOKEN,
        template_kind=template,
        seed=args.seed if args.seed is not None else 0,
        exclude_answer_overlap=bool(args.exclude_answer_overlap),
        mask_all_occurrences=bool(args.mask_all_occurrences),
        random_span_count=args.random_span_count if args.random_span_count is not None else 2,
    )


def cmd_augment(args: argparse.Namespace) -> int:
    train = _require_file(args.train, "training file")
    options = _resolved_augment_options(args)
    inputs: dict[str, Path] = {"train": train}

    automaton = None
    gazetteer_stats = {}
    if options.template_kind != "random":
        if not args.gazetteer:
            raise UsageError("--gazetteer is required unless --template random")
        gaz_path = _require_file(args.gazetteer, "gazetteer file")
        inputs["gazetteer"] = gaz_path
        norm = NormalizationOptions(case_fold=bool(args.case_fold))
        gazetteer = load_gazetteer(gaz_path, norm)
        gazetteer_stats = {
            "records": len(gazetteer.records),
            "surfaces": len(gazetteer.surface_index),
            "rejected": gazetteer.rejected,
            "deduplicated": gazetteer.deduplicated,
        }
        automaton = build_automaton(gazetteer)

    examples = load_mrqa(train)
    if args.split:
        split_path = _require_file(args.split, "split manifest")
        inputs["split"] = split_path
        manifest = json.loads(split_path.read_text(encoding="utf-8"))
        by_qid = {e.qid: e for e in examples}
        try:
            examples = [by_qid[qid] for qid in manifest["qids"]]
        except KeyError as exc:
            raise ValueError(f"split qid {exc} not present in {train}") from exc

    augmented = augment_dataset(examples, automaton, options, workers=_worker_count())

    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as fh:
        for pair in augmented.ori_pairs:
            fh.write(json.dumps(pair.to_dict(), ensure_ascii=False) + "\n")
        for pair in augmented.aug_pairs:
            fh.write(json.dumps(pair.to_dict(), ensure_ascii=False) + "\n")

    n_examples = len(augmented.ori_pairs)
    n_aug = len(augmented.aug_pairs)
    stats = {
        "examples": n_examples,
        "ori_pairs": n_examples,
        "aug_pairs": n_aug,
        "avg_aug_per_example": (n_aug / n_examples) if n_examples else 0.0,
        "span_counts": augmented.span_counts,
        "gazetteer": gazetteer_stats,
        "provenance": augmented.provenance,
    }
    _write_json(Path(str(out) + ".stats.json"), stats)
    _write_sidecar(
        out,
        config={"command": "augment", **options.to_dict(), "case_fold": bool(args.case_fold)},
        inputs=inputs,
    )
    print(f"wrote {n_examples} ori + {n_aug} aug pairs to {out}")
    return 0


def _load_golds(path: Path) -> dict[str, tuple[str, ...]]:
    return {e.qid: e.gold_answers for e in load_mrqa(path)}


def cmd_eval(args: argparse.Namespace) -> int:
    gold_path = _require_file(args.gold, "gold file")
    golds = _load_golds(gold_path)
    inputs: dict[str, Path] = {"gold": gold_path}

    reports = []
    total_missing = 0
    for i, pred_file in enumerate(args.predictions):
        pred_path = _require_file(pred_file, "predictions file")
        inputs[f"predictions_{i}"] = pred_path
        predictions = json.loads(pred_path.read_text(encoding="utf-8"))
        if not isinstance(predictions, dict):
            raise ValueError(f"{pred_path}: predictions must be a JSON object mapping qid to string")
        report, missing = evaluate_run(predictions, golds)
        if missing:
            logger.warning("%s: %d qids missing from predictions, scored 0", pred_path, missing)
        total_missing += missing
        reports.append(report)

    if len(reports) == 1:
        final = reports[0]
    else:
        final = aggregate(reports)
    payload = final.to_dict()
    if not args.per_example:
        payload["per_example"] = {}
    payload["runs"] = [r.mean_f1 for r in reports]
    payload["missing_predictions"] = total_missing

    out = Path(args.out)
    _write_json(out, payload)
    _write_sidecar(out, config={"command": "eval", "per_example": bool(args.per_example)}, inputs=inputs)
    print(f"mean_f1={final.mean_f1:.6f} std_f1={final.std_f1:.6f} n={final.n}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    """Aggregate augmentation stats into a delimited report.

    Accepts prompt JSONL files (recounted directly, which doubles as an
    independent check of the emitted counts) and/or .stats.json sidecars.
    """
    rows = []
    inputs: dict[str, Path] = {}
    for i, path_str in enumerate(args.files):
        path = _require_file(path_str, "stats input")
        inputs[f"input_{i}"] = path
        if path.name.endswith(".json"):
            payload = json.loads(path.read_text(encoding="utf-8"))
            rows.append(
                {
                    "dataset": path.name.replace(".stats.json", ""),
                    "examples": payload["examples"],
                    "aug_pairs": payload["aug_pairs"],
                    "avg_aug_per_example": payload["avg_aug_per_example"],
                }
            )
        else:
            n_ori = 0
            n_aug = 0
            with open(path, "r", encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    record = json.loads(line)
                    if record["kind"] == "ori":
                        n_ori += 1
                    elif record["kind"] == "aug":
                        n_aug += 1
            rows.append(
                {
                    "dataset": path.name.split(".")[0],
                    "examples": n_ori,
                    "aug_pairs": n_aug,
                    "avg_aug_per_example": (n_aug / n_ori) if n_ori else 0.0,
                }
            )

    lines = ["dataset\texamples\taug_pairs\tavg_aug_per_example"]
    for row in rows:
        lines.append(
            f"{row['dataset']}\t{row['examples']}\t{row['aug_pairs']}\t{row['avg_aug_per_example']:.4f}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        out = Path(args.out)
        out.write_text(text, encoding="utf-8")
        _write_sidecar(out, config={"command": "stats"}, inputs=inputs)
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gotta",
        description="Entity-aware cloze augmentation for few-shot QA training sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="draw a deterministic few-shot split")
    p_sample.add_argument("--train", required=True, help="MRQA JSON-lines training file")
    p_sample.add_argument("--k", type=int, default=None, help="split size (ladder: 16/32/64/128)")
    p_sample.add_argument("--seed", type=int, default=None)
    p_sample.add_argument("--dataset", default=None, help="dataset name recorded in the manifest")
    p_sample.add_argument("--out", required=True, help="split manifest output path")
    p_sample.add_argument("--config", default=None, help="key=value config file")
    p_sample.set_defaults(func=cmd_sample)

    p_aug = sub.add_parser("augment", help="emit ori+aug prompt pairs as JSON lines")
    p_aug.add_argument("--train", required=True, help="MRQA JSON-lines training file")
    p_aug.add_argument("--gazetteer", default=None, help="entity dictionary (id<TAB>surface)")
    p_aug.add_argument("--split", default=None, help="split manifest restricting the examples")
    p_aug.add_argument("--out", required=True, help="output JSONL path")
    p_aug.add_argument("--mask-token", dest="mask_token", default=None)
    p_aug.add_argument("--template", choices=TEMPLATE_KINDS, default=None)
    p_aug.add_argument("--seed", type=int, default=None)
    p_aug.add_argument("--case-fold", dest="case_fold", action="store_true", default=None)
    p_aug.add_argument(
        "--exclude-answer-overlap",
        dest="exclude_answer_overlap",
        action="store_true",
        default=None,
        help="drop entity spans overlapping a gold answer span",
    )
    p_aug.add_argument(
        "--mask-all-occurrences",
        dest="mask_all_occurrences",
        action="store_true",
        default=None,
        help="mask every occurrence of the selected surface, not just the span",
    )
    p_aug.add_argument("--random-span-count", dest="random_span_count", type=int, default=None)
    p_aug.add_argument("--config", default=None, help="key=value config file")
    p_aug.set_defaults(func=cmd_augment)

    p_eval = sub.add_parser("eval", help="score predictions with token F1")
    p_eval.add_argument("--gold", required=True, help="MRQA JSON-lines file with gold answers")
    p_eval.add_argument(
        "--predictions", nargs="+", required=True, help="JSON file(s) mapping qid to predicted string"
    )
    p_eval.add_argument("--out", required=True, help="report JSON output path")
    p_eval.add_argument("--per-example", dest="per_example", action="store_true", default=None)
    p_eval.add_argument("--config", default=None, help="key=value config file")
    p_eval.set_defaults(func=cmd_eval)

    p_stats = sub.add_parser("stats", help="tabulate augmentation counts")
    p_stats.add_argument("files", nargs="+", help="prompt JSONL files or .stats.json sidecars")
    p_stats.add_argument("--out", default=None, help="TSV output path (stdout otherwise)")
    p_stats.set_defaults(func=cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_defaults(args)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, never crashes
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
