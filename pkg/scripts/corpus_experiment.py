#!/usr/bin/env python3
"""Seeded error-injection study: does step marking beat final-answer-only?

Generates a 100-script corpus for the linear question with the no-sign-flip
move error planted at 30% per step, grades it, checks the graded error count
against the generator's ground-truth log, and prints the method-marking vs
final-answer-only comparison.

Usage: python scripts/corpus_experiment.py [out_dir] [--kb path] [--seed n]
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

from stepmark.corpus import batch_grade, compare_graders, generate_corpus, write_report
from stepmark.kb import load_kb

DEFAULT_KB = Path(__file__).resolve().parent.parent / "fixtures" / "kb.json"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", nargs="?", default="experiment_out")
    parser.add_argument("--kb", default=str(DEFAULT_KB))
    parser.add_argument("--question", default="Q1")
    parser.add_argument("--n", type=int, default=100)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--inject", default="b_moveflip")
    parser.add_argument("--rate", type=float, default=0.3)
    args = parser.parse_args()

    kb = load_kb(args.kb)
    out = Path(args.out)

    corpus_path, log_path = generate_corpus(
        kb, args.question, args.n, {args.inject: args.rate}, args.seed, out
    )
    log = json.loads(Path(log_path).read_text(encoding="utf-8"))
    planted = log["injection_counts"].get(args.inject, 0)
    print(f"generated {args.n} scripts (seed {args.seed}); planted {planted} "
          f"instances of {args.inject} at rate {args.rate}")

    transcripts, report = batch_grade(corpus_path, kb)
    with open(out / "transcripts.jsonl", "w", encoding="utf-8") as fh:
        for t in transcripts:
            fh.write(json.dumps(t, sort_keys=True) + "\n")
    write_report(report, out)

    graded = report.question(args.question).error_counts.get(args.inject, 0)
    match = "EXACT MATCH" if graded == planted else "MISMATCH"
    print(f"graded error count: {graded}  (ground truth {planted}) -> {match}")

    comparison = compare_graders(transcripts)
    print(
        f"mean mark, step marking:       {comparison['mean_mmc']:.2f}\n"
        f"mean mark, final-answer-only:  {comparison['mean_final_only']:.2f}\n"
        f"scripts where step marking scored higher: "
        f"{comparison['mmc_greater_count']}/{len(comparison['rows'])}"
    )
    print(f"\nfull report:\n{report.to_text()}", end="")
    print(f"artifacts in {out}/")
    return 0 if graded == planted else 1


if __name__ == "__main__":
    raise SystemExit(main())
