"""Batch grading of solution corpora and descriptive statistics.

A corpus is a JSON Lines file of scripts (ordered submission texts per
question). Scripts replay straight through the tracer — no sessions, nothing
persisted — and the results reduce to frequency tables: how often each known
error fired, which strategies students used, and how method marking compares
with grading the final answer alone.

A synthetic-corpus generator stands in for real exam scripts: it walks a
random strategy and, per step, injects a known-buggy rule or an arithmetic
slip with configured probabilities, keeping a ground-truth log of what it
planted so reports can be checked against it exactly.
"""
from __future__ import annotations

import json
import random
import statistics
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .engine import (
    ENGINE_SEED,
    Classification,
    assess_final,
    grade_final_answer_only,
    literal_values,
    new_blackboard,
    parse_submission,
    trace_step,
    update_blackboard,
)
from .errors import (
    BadErrorProfileError,
    CorpusFormatError,
    KbReferenceError,
    SubmissionRejectedError,
    UnknownQuestionError,
)
from .expr import Equation, MathLine, Num, render_line
from .kb import (
    KnowledgeBase,
    Production,
    ProductionKind,
    Question,
    apply_production,
    infer_params,
)
from .sessions import final_to_jsonable, step_to_jsonable

REJECTED = "SubmissionRejected"  # histogram bucket for unparseable lines


@dataclass(frozen=True)
class CorpusRecord:
    script_id: str
    question_id: str
    submissions: tuple[str, ...]


def record_to_jsonable(record: CorpusRecord) -> dict:
    return {
        "script_id": record.script_id,
        "question_id": record.question_id,
        "submissions": list(record.submissions),
    }


def read_corpus(path: str | Path) -> list[CorpusRecord]:
    """Parse a JSON Lines corpus; blank lines are ignored."""
    records: list[CorpusRecord] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise CorpusFormatError(line_no, "record must be a JSON object")
            script_id = obj.get("script_id")
            question_id = obj.get("question_id")
            submissions = obj.get("submissions")
            if not isinstance(script_id, str) or not script_id:
                raise CorpusFormatError(line_no, "script_id must be a non-empty string")
            if not isinstance(question_id, str) or not question_id:
                raise CorpusFormatError(line_no, "question_id must be a non-empty string")
            if (
                not isinstance(submissions, list)
                or not submissions
                or not all(isinstance(s, str) for s in submissions)
            ):
                raise CorpusFormatError(
                    line_no, "submissions must be a non-empty list of strings"
                )
            records.append(CorpusRecord(script_id, question_id, tuple(submissions)))
    return records


def write_corpus(records: list[CorpusRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_jsonable(record), sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# grading

def grade_script(kb: KnowledgeBase, record: CorpusRecord) -> dict:
    """Replay one script through the tracer and return its transcript."""
    if not kb.has_question(record.question_id):
        raise UnknownQuestionError(record.question_id, f"script {record.script_id}")
    question = kb.question(record.question_id)
    bb = new_blackboard(question)
    steps: list[dict] = []
    for text in record.submissions:
        try:
            assessment = trace_step(bb, text, kb, question)
        except SubmissionRejectedError as exc:
            steps.append(
                {
                    "index": None,
                    "submitted": text,
                    "rejected": True,
                    "error": str(exc),
                    "classification": REJECTED,
                }
            )
            continue
        line = parse_submission(text, question)
        bb = update_blackboard(bb, text, line, assessment, question)
        steps.append(step_to_jsonable(bb.steps[-1]))
    report = assess_final(bb, question)
    final_only = grade_final_answer_only(question, list(record.submissions))
    return {
        "script_id": record.script_id,
        "question_id": question.id,
        "declared_steps": None,
        "kb_version": kb.version,
        "kb_fingerprint": kb.fingerprint(),
        "engine_seed": ENGINE_SEED,
        "steps": steps,
        "final": final_to_jsonable(report, final_only),
    }


# ---------------------------------------------------------------------------
# report

@dataclass(frozen=True)
class QuestionReport:
    question_id: str
    total_scripts: int
    total_steps: int
    error_counts: dict  # buggy production id -> step occurrences
    strategy_counts: dict  # strategy id or "Unattributed" -> scripts
    classification_counts: dict  # classification -> steps
    mark_mean: float
    mark_median: float
    mark_stdev: float
    mark_min: int
    mark_max: int
    unrecognized_rate: float  # fraction of steps classified Unrecognized
    comparison: dict  # per-script method-marking vs final-answer-only

    def error_percentage(self, production_id: str) -> float:
        """Share of all assessed steps exhibiting this error (derived, not stored)."""
        if self.total_steps == 0:
            return 0.0
        return 100.0 * self.error_counts.get(production_id, 0) / self.total_steps

    def to_jsonable(self) -> dict:
        return {
            "question_id": self.question_id,
            "total_scripts": self.total_scripts,
            "total_steps": self.total_steps,
            "error_counts": {
                pid: {"count": count, "percentage": round(self.error_percentage(pid), 4)}
                for pid, count in sorted(self.error_counts.items())
            },
            "strategy_counts": dict(sorted(self.strategy_counts.items())),
            "classification_counts": dict(sorted(self.classification_counts.items())),
            "mark_distribution": {
                "mean": self.mark_mean,
                "median": self.mark_median,
                "stdev": self.mark_stdev,
                "min": self.mark_min,
                "max": self.mark_max,
            },
            "unrecognized_rate": self.unrecognized_rate,
            "mmc_vs_final_only": self.comparison,
        }


@dataclass(frozen=True)
class FrequencyReport:
    questions: tuple[QuestionReport, ...]

    def question(self, question_id: str) -> QuestionReport:
        for q in self.questions:
            if q.question_id == question_id:
                return q
        raise KeyError(question_id)

    def to_jsonable(self) -> dict:
        return {"questions": [q.to_jsonable() for q in self.questions]}

    def to_text(self) -> str:
        lines = ["Corpus report", "============="]
        if not self.questions:
            lines.append("(empty corpus)")
        for q in self.questions:
            lines.append("")
            lines.append(
                f"Question {q.question_id} — {q.total_scripts} scripts, {q.total_steps} steps"
            )
            lines.append(
                "  marks: mean {:.3f}  median {:.1f}  stdev {:.3f}  min {}  max {}".format(
                    q.mark_mean, q.mark_median, q.mark_stdev, q.mark_min, q.mark_max
                )
            )
            lines.append(
                f"  unrecognized steps: {100.0 * q.unrecognized_rate:.2f}%"
            )
            cmp_ = q.comparison
            lines.append(
                "  method marking vs final-answer-only: mean {:.3f} vs {:.3f}; higher on {} of {} scripts".format(
                    cmp_["mean_mmc"],
                    cmp_["mean_final_only"],
                    cmp_["mmc_greater_count"],
                    q.total_scripts,
                )
            )
            if q.error_counts:
                lines.append("  errors:")
                width = max(len(pid) for pid in q.error_counts)
                for pid, count in sorted(q.error_counts.items()):
                    lines.append(
                        f"    {pid:<{width}}  {count:>5}  {q.error_percentage(pid):6.2f}% of steps"
                    )
            if q.strategy_counts:
                lines.append("  strategies:")
                width = max(len(s) for s in q.strategy_counts)
                for sid, count in sorted(q.strategy_counts.items()):
                    lines.append(f"    {sid:<{width}}  {count:>5}")
            if q.classification_counts:
                lines.append("  classifications:")
                width = max(len(c) for c in q.classification_counts)
                for name, count in sorted(q.classification_counts.items()):
                    lines.append(f"    {name:<{width}}  {count:>5}")
        return "\n".join(lines) + "\n"


def report_from_jsonable(doc: dict) -> FrequencyReport:
    """Rebuild a report from report.json (percentages are derived, not read)."""
    questions = []
    for q in doc.get("questions", []):
        dist = q["mark_distribution"]
        questions.append(
            QuestionReport(
                question_id=q["question_id"],
                total_scripts=q["total_scripts"],
                total_steps=q["total_steps"],
                error_counts={
                    pid: entry["count"] for pid, entry in q["error_counts"].items()
                },
                strategy_counts=dict(q["strategy_counts"]),
                classification_counts=dict(q["classification_counts"]),
                mark_mean=dist["mean"],
                mark_median=dist["median"],
                mark_stdev=dist["stdev"],
                mark_min=dist["min"],
                mark_max=dist["max"],
                unrecognized_rate=q["unrecognized_rate"],
                comparison=q["mmc_vs_final_only"],
            )
        )
    return FrequencyReport(questions=tuple(questions))


def compare_graders(transcripts: list[dict]) -> dict:
    """Per-script method-marking total vs the final-answer-only baseline."""
    rows = [
        {
            "script_id": t.get("script_id") or t.get("session_id") or "",
            "mmc": t["final"]["earned"],
            "final_only": t["final"]["final_answer_only_mark"],
        }
        for t in transcripts
    ]
    n = len(rows)
    return {
        "rows": rows,
        "mean_mmc": (sum(r["mmc"] for r in rows) / n) if n else 0.0,
        "mean_final_only": (sum(r["final_only"] for r in rows) / n) if n else 0.0,
        "mmc_greater_count": sum(1 for r in rows if r["mmc"] > r["final_only"]),
    }


def build_report(transcripts: list[dict]) -> FrequencyReport:
    by_question: dict[str, list[dict]] = {}
    for t in transcripts:
        by_question.setdefault(t["question_id"], []).append(t)

    questions = []
    for question_id in sorted(by_question):
        batch = by_question[question_id]
        error_counts: dict[str, int] = {}
        strategy_counts: dict[str, int] = {}
        classification_counts: dict[str, int] = {}
        marks: list[int] = []
        total_steps = 0
        unrecognized = 0
        for t in batch:
            marks.append(t["final"]["earned"])
            attribution = t["final"]["strategy_attribution"]
            strategy_counts[attribution] = strategy_counts.get(attribution, 0) + 1
            for step in t["steps"]:
                total_steps += 1
                cls = step["classification"]
                classification_counts[cls] = classification_counts.get(cls, 0) + 1
                if cls == Classification.UNRECOGNIZED.value:
                    unrecognized += 1
                if cls == Classification.KNOWN_ERROR.value:
                    for m in step["matched"]:
                        pid = m["production"]
                        error_counts[pid] = error_counts.get(pid, 0) + 1
        questions.append(
            QuestionReport(
                question_id=question_id,
                total_scripts=len(batch),
                total_steps=total_steps,
                error_counts=error_counts,
                strategy_counts=strategy_counts,
                classification_counts=classification_counts,
                mark_mean=statistics.mean(marks) if marks else 0.0,
                mark_median=statistics.median(marks) if marks else 0.0,
                mark_stdev=statistics.pstdev(marks) if marks else 0.0,
                mark_min=min(marks) if marks else 0,
                mark_max=max(marks) if marks else 0,
                unrecognized_rate=(unrecognized / total_steps) if total_steps else 0.0,
                comparison=compare_graders(batch),
            )
        )
    return FrequencyReport(questions=tuple(questions))


def batch_grade(
    corpus: str | Path | list[CorpusRecord], kb: KnowledgeBase
) -> tuple[list[dict], FrequencyReport]:
    """Grade every script in a corpus file (or pre-read record list)."""
    records = corpus if isinstance(corpus, list) else read_corpus(corpus)
    transcripts = [grade_script(kb, record) for record in records]
    return transcripts, build_report(transcripts)


def write_report(report: FrequencyReport, out_dir: str | Path) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "report.json"
    text_path = out / "report.txt"
    json_path.write_text(
        json.dumps(report.to_jsonable(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    text_path.write_text(report.to_text(), encoding="utf-8")
    return json_path, text_path


# ---------------------------------------------------------------------------
# synthetic-corpus generation

SLIP_DELTAS = (-2, -1, 1, 2)


def _first_applicable(
    production: Production,
    pinned: tuple | None,
    premise: MathLine,
) -> MathLine | None:
    if pinned is not None:
        choices = [pinned]
    elif production.params is not None:
        choices = [production.params]
    else:
        choices = infer_params(production, premise) or [()]
    for params in choices:
        result = apply_production(production, params, premise)
        if result is not None:
            return result
    return None


def _perturb_fresh_literal(
    line: MathLine, premise: MathLine, rng: random.Random
) -> MathLine | None:
    """Nudge one freshly-computed literal in `line` to fake an arithmetic slip.

    "Fresh" uses the same taboo set as the lenient matcher (literal_values of
    the premise), so an accepted perturbation is wildcardable by construction.
    """
    if not isinstance(line, Equation):
        return None
    taboo = literal_values(premise)
    delta = Fraction(rng.choice(SLIP_DELTAS))

    changed = [False]

    def rewrite(e):
        if changed[0]:
            return e
        if isinstance(e, Num) and e.value not in taboo and e.value + delta != 0:
            changed[0] = True
            return Num(e.value + delta)
        if hasattr(e, "terms"):
            return type(e)(tuple(rewrite(t) for t in e.terms))
        if hasattr(e, "factors"):
            return type(e)(tuple(rewrite(f) for f in e.factors))
        if hasattr(e, "base"):
            return type(e)(rewrite(e.base), e.exponent)
        return e

    new_lhs = rewrite(line.lhs)
    new_rhs = rewrite(line.rhs)
    if not changed[0]:
        return None
    return Equation(new_lhs, new_rhs)


def _check_profile(kb: KnowledgeBase, error_profile: dict) -> list[tuple[str, float]]:
    items = sorted(error_profile.items())
    total = 0.0
    for pid, prob in items:
        if not kb.has_production(pid):
            raise KbReferenceError(pid, "error_profile")
        if kb.production(pid).kind is not ProductionKind.BUGGY:
            raise BadErrorProfileError(f"{pid} is not a buggy production")
        if not 0.0 <= prob <= 1.0:
            raise BadErrorProfileError(f"probability {prob} for {pid} outside [0, 1]")
        total += prob
    if total > 1.0:
        raise BadErrorProfileError(f"profile probabilities sum to {total} > 1")
    return items


def generate_corpus(
    kb: KnowledgeBase,
    question_id: str,
    n: int,
    error_profile: dict,
    seed: int,
    out_dir: str | Path,
    slip_rate: float = 0.0,
) -> tuple[Path, Path]:
    """Write `corpus.jsonl` and `injection_log.json` for n synthetic scripts.

    Every planted error or slip is verified through the tracer before being
    logged, so the log is exact ground truth for the graded report.
    """
    if not kb.has_question(question_id):
        raise UnknownQuestionError(question_id)
    question = kb.question(question_id)
    profile = _check_profile(kb, error_profile)
    if not 0.0 <= slip_rate <= 1.0 or sum(p for _, p in profile) + slip_rate > 1.0:
        raise BadErrorProfileError("slip rate pushes per-step probability above 1")

    rng = random.Random(seed)
    records: list[CorpusRecord] = []
    per_script = []
    injection_counts: dict[str, int] = {}
    slip_count = 0

    for i in range(n):
        strategy = rng.choice(question.strategies)
        bb = new_blackboard(question)
        submissions: list[str] = []
        injections = []
        slips = []
        for step in strategy.expected:
            production = kb.production(step.production_id)
            correct_line = _first_applicable(production, step.params, bb.premise)
            if correct_line is None:
                break  # strategy stalled on a mutated premise; end the script here

            draw = rng.random()
            cumulative = 0.0
            planted_bug = None
            for pid, prob in profile:
                cumulative += prob
                if draw < cumulative:
                    planted_bug = pid
                    break
            want_slip = planted_bug is None and draw < cumulative + slip_rate

            chosen_text = None
            if planted_bug is not None:
                buggy_line = _first_applicable(
                    kb.production(planted_bug), None, bb.premise
                )
                if buggy_line is not None:
                    text = render_line(buggy_line)
                    assessment = trace_step(bb, text, kb, question)
                    if (
                        assessment.classification is Classification.KNOWN_ERROR
                        and assessment.matched
                        and assessment.matched[0].production_id == planted_bug
                    ):
                        chosen_text, chosen_assessment = text, assessment
                        injections.append(
                            {"step": len(submissions) + 1, "production": planted_bug}
                        )
                        injection_counts[planted_bug] = (
                            injection_counts.get(planted_bug, 0) + 1
                        )
            elif want_slip:
                slipped = _perturb_fresh_literal(correct_line, bb.premise, rng)
                if slipped is not None:
                    text = render_line(slipped)
                    assessment = trace_step(bb, text, kb, question)
                    if (
                        assessment.classification
                        is Classification.CORRECT_METHOD_WRONG_ARITHMETIC
                    ):
                        chosen_text, chosen_assessment = text, assessment
                        slips.append(
                            {"step": len(submissions) + 1, "production": production.id}
                        )
                        slip_count += 1

            if chosen_text is None:  # clean step (or plant failed verification)
                chosen_text = render_line(correct_line)
                chosen_assessment = trace_step(bb, chosen_text, kb, question)

            line = parse_submission(chosen_text, question)
            bb = update_blackboard(bb, chosen_text, line, chosen_assessment, question)
            submissions.append(chosen_text)

        if not submissions:
            continue  # cannot happen on a validated KB; keeps records well-formed
        script_id = f"s{i:04d}"
        records.append(CorpusRecord(script_id, question_id, tuple(submissions)))
        per_script.append(
            {
                "script_id": script_id,
                "strategy": strategy.id,
                "injections": injections,
                "slips": slips,
            }
        )

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus_path = out / "corpus.jsonl"
    log_path = out / "injection_log.json"
    write_corpus(records, corpus_path)
    log = {
        "question_id": question_id,
        "n": n,
        "seed": seed,
        "error_profile": dict(sorted(error_profile.items())),
        "slip_rate": slip_rate,
        "injection_counts": dict(sorted(injection_counts.items())),
        "slip_count": slip_count,
        "scripts": per_script,
    }
    log_path.write_text(
        json.dumps(log, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return corpus_path, log_path
