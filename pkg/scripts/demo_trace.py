#!/usr/bin/env python3
"""Grade a few worked solutions line by line and print the marking trace.

Usage: python scripts/demo_trace.py [path/to/kb.json]
"""
from __future__ import annotations

import sys
from pathlib import Path

from stepmark.engine import (
    assess_final,
    new_blackboard,
    parse_submission,
    trace_step,
    update_blackboard,
)
from stepmark.expr import render_line
from stepmark.kb import load_kb

DEMOS = [
    ("Q1", "clean two-step solve", ["3x = 15", "x = 5"]),
    ("Q1", "arithmetic slip, then follow-through", ["3x = 14", "x = 14/3"]),
    ("Q1", "known sign error, then follow-through", ["3x = 25", "x = 25/3"]),
    ("Q1", "unrecognized line stands as the student's working", ["2x = 9", "x = 9/2"]),
    ("Q2", "factor then read roots", ["(x-2)(x-3) = 0", "x = 2 or x = 3"]),
    ("Q2", "straight to the roots (composition)", ["x = 2 or x = 3"]),
]


def run_demo(kb, question_id: str, title: str, texts: list[str]) -> None:
    question = kb.question(question_id)
    print(f"\n=== {question_id}: {title}")
    print(f"    premise  {render_line(question.initial)}")
    bb = new_blackboard(question)
    for text in texts:
        assessment = trace_step(bb, text, kb, question)
        line = parse_submission(text, question)
        bb = update_blackboard(bb, text, line, assessment, question)
        matched = "+".join(m.production_id for m in assessment.matched) or "-"
        flags = "".join(
            label
            for label, on in [
                (" follow-through", assessment.follow_through),
                (" ambiguous", assessment.ambiguous),
            ]
            if on
        )
        print(
            f"    {text:<22} {assessment.classification.value:<30} "
            f"M{assessment.method_awarded} A{assessment.accuracy_awarded} "
            f"[{matched}]{flags}"
        )
        if assessment.feedback:
            print(f"    {'':<22} feedback: {assessment.feedback}")
    final = assess_final(bb, question)
    print(
        f"    total {final.earned}/{final.max_marks}"
        f" (method {final.earned_method}, accuracy {final.earned_accuracy});"
        f" strategy {final.strategy_attribution};"
        f" reached final answer: {final.reached_correct_final}"
    )


def main() -> int:
    kb_path = sys.argv[1] if len(sys.argv) > 1 else str(
        Path(__file__).resolve().parent.parent / "fixtures" / "kb.json"
    )
    kb = load_kb(kb_path)
    print(f"knowledge base {kb.version} ({kb.fingerprint()[:12]}…)")
    for question_id, title, texts in DEMOS:
        run_demo(kb, question_id, title, texts)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
