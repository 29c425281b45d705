"""Command-line entry points: ``eval run`` and ``eval sweep``.

``run`` scores a dataset of evaluation cases and can gate CI with
``--min-*`` thresholds; ``sweep`` executes the configuration grid and emits
the comparison CSV.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
from pathlib import Path

from ..embeddings import HashingEmbeddingProvider
from .judges import LexicalJudge, ScriptedJudge
from .metrics import METRIC_FIELDS, EvalCase, score_case
from .sweep import (SweepConfig, default_fixture_corpus,
                    default_fixture_questions, run_config_sweep)


def _load_cases(path: str) -> list[tuple[EvalCase, dict]]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    out = []
    for i, raw in enumerate(data):
        case = EvalCase(
            case_id=raw.get("case_id", f"case-{i}"),
            question=raw["question"],
            ground_truth=raw.get("ground_truth", ""),
            retrieved_contexts=tuple(raw.get("retrieved_contexts", ())),
            answer=raw.get("answer", ""),
            discipline=raw.get("discipline", "stem"),
            mode=raw.get("mode", "quick"),
        )
        out.append((case, raw.get("judge", {})))
    return out


def _judge_for(name: str, spec: dict):
    if name == "lexical":
        return LexicalJudge()
    if name == "scripted":
        return ScriptedJudge(
            claims=spec.get("claims"),
            claim_verdicts=spec.get("claim_verdicts"),
            statement_verdicts=spec.get("statement_verdicts"),
            context_verdicts=spec.get("context_verdicts"),
            questions=spec.get("questions"),
        )
    raise SystemExit(f"unknown judge {name!r} (use: lexical, scripted)")


def cmd_run(args) -> int:
    cases = _load_cases(args.dataset)
    embedder = HashingEmbeddingProvider()
    rows = []
    samples = {m: [] for m in METRIC_FIELDS}
    for case, judge_spec in cases:
        judge = _judge_for(args.judge, judge_spec)
        scores = score_case(case, judge, embedder)
        row = {"case_id": case.case_id, **scores.as_dict()}
        rows.append(row)
        for m in METRIC_FIELDS:
            value = getattr(scores, m)
            if value is not None:
                samples[m].append(value)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=["case_id", *METRIC_FIELDS])
            writer.writeheader()
            writer.writerows(rows)
    failed = False
    for m in METRIC_FIELDS:
        mean = statistics.fmean(samples[m]) if samples[m] else None
        threshold = getattr(args, f"min_{m}")
        status = ""
        if threshold is not None and (mean is None or mean < threshold):
            status = f"  BELOW THRESHOLD {threshold}"
            failed = True
        shown = "n/a" if mean is None else f"{mean:.4f}"
        print(f"{m}: {shown}{status}")
    return 1 if failed else 0


def cmd_sweep(args) -> int:
    cfg = {}
    if args.config:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    corpus = cfg.get("corpus") or default_fixture_corpus()
    questions = cfg.get("questions") or default_fixture_questions()
    config = SweepConfig(
        chunk_sizes=tuple(cfg.get("chunk_sizes", (512, 1000))),
        temperatures=tuple(cfg.get("temperatures", (0.1, 0.3))),
        top_ks=tuple(cfg.get("top_ks", (5, 10, 15))),
        disciplines=tuple(cfg.get("disciplines", ("stem", "humanities"))),
    )
    out = args.out or cfg.get("out", "sweep.csv")
    rows = run_config_sweep(corpus, questions, config, out_csv=out)
    errors = [r for r in rows if r.get("error")]
    print(f"wrote {len(rows)} cells to {out} ({len(errors)} failed)")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="eval",
                                     description="RAG evaluation harness")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="score a dataset of evaluation cases")
    run.add_argument("--dataset", required=True)
    run.add_argument("--judge", default="lexical")
    run.add_argument("--out", default="")
    for m in METRIC_FIELDS:
        run.add_argument(f"--min-{m.replace('_', '-')}", dest=f"min_{m}",
                         type=float, default=None)
    run.set_defaults(fn=cmd_run)

    sweep = sub.add_parser("sweep", help="run the configuration grid sweep")
    sweep.add_argument("--config", default="")
    sweep.add_argument("--out", default="")
    sweep.set_defaults(fn=cmd_sweep)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
