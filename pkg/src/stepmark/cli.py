"""Operator command line: validate knowledge, serve, batch-grade, analyze.

Exit codes: 0 success, 1 domain failure (validation findings, grading errors),
2 usage or I/O problems (argparse uses 2 for bad flags natively).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .api import ASSESSOR_KEY_ENV, DATA_DIR_ENV, create_app
from .corpus import (
    batch_grade,
    generate_corpus,
    report_from_jsonable,
    write_report,
)
from .errors import StepmarkError
from .kb import OPERATOR_JSON, KnowledgeBase, ProductionKind, load_kb, validate_kb

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def _load_kb_or_exit(path: str) -> KnowledgeBase:
    try:
        return load_kb(path)
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _inject_pair(value: str) -> tuple[str, float]:
    name, sep, prob = value.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(
            f"expected NAME=PROBABILITY, got {value!r}"
        )
    try:
        return name, float(prob)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad probability in {value!r}")


def _resolve_buggy_id(kb: KnowledgeBase, name: str) -> str:
    """Accept a production id or a buggy rule's operator name (e.g. from docs)."""
    if kb.has_production(name):
        return name
    matches = [
        p.id
        for p in kb.productions
        if p.kind is ProductionKind.BUGGY and OPERATOR_JSON[p.operator] == name
    ]
    if len(matches) == 1:
        return matches[0]
    return name  # let generate_corpus raise the reference error


def _cmd_kb_validate(args: argparse.Namespace) -> int:
    kb = _load_kb_or_exit(args.kb)
    report = validate_kb(kb)
    for finding in report.findings:
        print(f"{finding.severity} {finding.code} {finding.location}: {finding.message}")
    criticals = len(report.criticals)
    print(
        f"{len(report.findings)} finding(s), {criticals} critical — "
        + ("OK" if report.ok else "REJECTED")
    )
    return EXIT_OK if report.ok else EXIT_DOMAIN


def _cmd_grade(args: argparse.Namespace) -> int:
    kb = _load_kb_or_exit(args.kb)
    if not Path(args.corpus).exists():
        print(f"error: cannot read {args.corpus}: no such file", file=sys.stderr)
        return EXIT_USAGE
    transcripts, report = batch_grade(args.corpus, kb)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "transcripts.jsonl", "w", encoding="utf-8") as fh:
        for t in transcripts:
            fh.write(json.dumps(t, sort_keys=True) + "\n")
    write_report(report, out)
    print(f"graded {len(transcripts)} script(s) -> {out}")
    print(report.to_text(), end="")
    return EXIT_OK


def _cmd_gen_corpus(args: argparse.Namespace) -> int:
    kb = _load_kb_or_exit(args.kb)
    profile = {}
    for name, prob in args.inject or []:
        pid = _resolve_buggy_id(kb, name)
        profile[pid] = profile.get(pid, 0.0) + prob
    corpus_path, log_path = generate_corpus(
        kb,
        args.question,
        args.n,
        profile,
        args.seed,
        args.out,
        slip_rate=args.slip,
    )
    print(f"wrote {corpus_path} and {log_path}")
    return EXIT_OK


def _cmd_stats(args: argparse.Namespace) -> int:
    report_path = Path(args.in_dir) / "report.json"
    try:
        doc = json.loads(report_path.read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"error: cannot read {report_path}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(f"error: {report_path} is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    print(report_from_jsonable(doc).to_text(), end="")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    kb = _load_kb_or_exit(args.kb)
    static_dir = args.static
    if static_dir is None:
        candidate = Path("frontend") / "dist"
        if candidate.is_dir():
            static_dir = candidate
    app = create_app(
        kb,
        args.data_dir,
        assessor_key=args.assessor_key,
        static_dir=static_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stepmark",
        description="Step-by-step marking for multi-step algebra working.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    kb_cmd = sub.add_parser("kb", help="knowledge-base tools")
    kb_sub = kb_cmd.add_subparsers(dest="kb_command", required=True)
    kb_validate = kb_sub.add_parser("validate", help="check a knowledge-base file")
    kb_validate.add_argument("kb", help="path to kb.json")
    kb_validate.set_defaults(func=_cmd_kb_validate)

    grade = sub.add_parser("grade", help="batch-grade a corpus file")
    grade.add_argument("--kb", required=True)
    grade.add_argument("--corpus", required=True)
    grade.add_argument("--out", required=True)
    grade.set_defaults(func=_cmd_grade)

    gen = sub.add_parser("gen-corpus", help="generate a synthetic corpus")
    gen.add_argument("--kb", required=True)
    gen.add_argument("--question", required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument(
        "--inject",
        type=_inject_pair,
        action="append",
        metavar="NAME=P",
        help="buggy rule (id or operator name) and per-step probability; repeatable",
    )
    gen.add_argument("--slip", type=float, default=0.0, help="arithmetic slip rate")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen_corpus)

    stats = sub.add_parser("stats", help="re-print a grade run's report")
    stats.add_argument("--in", dest="in_dir", required=True, metavar="DIR")
    stats.set_defaults(func=_cmd_stats)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--kb", required=True)
    serve.add_argument(
        "--data-dir", default=os.environ.get(DATA_DIR_ENV, "data"), metavar="DIR"
    )
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument(
        "--assessor-key",
        default=os.environ.get(ASSESSOR_KEY_ENV, ""),
        help=f"defaults to ${ASSESSOR_KEY_ENV}",
    )
    serve.add_argument("--static", default=None, help="directory of built UI assets")
    serve.set_defaults(func=_cmd_serve)

    return parser


def entry(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StepmarkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(entry())
