"""Knowledge-base level checks: coded findings plus strategy replay.

A strategy is proven reachable by replaying its production sequence from the
question's initial line (searching inferred parameters depth-first) and
checking the final line explicitly states the question's recorded answer.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import (
    DegreeLimitError,
    EquivUndecidableError,
    NotEquationError,
    NotPolynomialError,
    UnsupportedDegreeError,
    ValidationRejectedError,
)
from ..expr import MathLine, SolutionSet, solution_set, stated_solution
from .models import (
    KnowledgeBase,
    Production,
    ProductionKind,
    Question,
    Strategy,
)
from .transforms import apply_production, infer_params

CRITICAL = "CRITICAL"
WARNING = "WARNING"

MAX_REPLAY_VISITS = 2000


@dataclass(frozen=True)
class Finding:
    code: str
    severity: str
    location: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def criticals(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == CRITICAL)

    @property
    def ok(self) -> bool:
        return not self.criticals

    def to_jsonable(self) -> dict:
        return {
            "ok": self.ok,
            "findings": [
                {
                    "code": f.code,
                    "severity": f.severity,
                    "location": f.location,
                    "message": f.message,
                }
                for f in self.findings
            ],
        }


def _solved(line: MathLine, unknown: str) -> SolutionSet | None:
    """Full solve, for checking the recorded answer against the initial line."""
    try:
        return solution_set(line, unknown)
    except (
        NotPolynomialError,
        UnsupportedDegreeError,
        NotEquationError,
        DegreeLimitError,
        EquivUndecidableError,
    ):
        return None


def _solution_of(line: MathLine, unknown: str) -> SolutionSet | None:
    # answer-form only: replay must END on a stated answer ("x = 5"), not just
    # pass through a line equivalent to it ("3x = 15")
    return stated_solution(line, unknown)


def replay_strategy(kb: KnowledgeBase, question: Question, strategy: Strategy) -> bool:
    """True when some parameter choice walks the strategy to the final answer."""
    budget = [MAX_REPLAY_VISITS]

    def step(premise: MathLine, remaining: tuple) -> bool:
        if budget[0] <= 0:
            return False
        budget[0] -= 1
        if not remaining:
            return _solution_of(premise, question.unknown) == question.final_answer
        head, *rest = remaining
        if not kb.has_production(head.production_id):
            return False
        production = kb.production(head.production_id)
        if production.kind is not ProductionKind.CORRECT:
            return False
        if head.params is not None:
            param_choices = [head.params]
        elif production.params is not None:
            param_choices = [production.params]
        else:
            param_choices = infer_params(production, premise) or [()]
        for params in param_choices:
            result = apply_production(production, params, premise)
            if result is not None and step(result, tuple(rest)):
                return True
        return False

    return step(question.initial, strategy.expected)


def _strategy_mark_total(kb: KnowledgeBase, strategy: Strategy) -> int | None:
    total = 0
    for s in strategy.expected:
        if not kb.has_production(s.production_id):
            return None
        p = kb.production(s.production_id)
        total += p.method_mark + p.accuracy_mark
    return total


def validate_kb(kb: KnowledgeBase) -> ValidationReport:
    findings: list[Finding] = []
    correct_ids = {p.id for p in kb.productions if p.kind is ProductionKind.CORRECT}

    for p in kb.productions:
        if p.kind is ProductionKind.BUGGY:
            if not p.buggy_of or p.buggy_of not in correct_ids:
                findings.append(
                    Finding(
                        "BuggyWithoutParent",
                        CRITICAL,
                        p.id,
                        "buggy rule must name an existing correct rule via buggy_of",
                    )
                )
            if p.accuracy_mark != 0:
                findings.append(
                    Finding(
                        "BuggyAccuracyNonzero",
                        CRITICAL,
                        p.id,
                        "buggy rules cannot award accuracy marks",
                    )
                )
        elif p.buggy_of is not None:
            findings.append(
                Finding(
                    "CorrectWithParent",
                    WARNING,
                    p.id,
                    "buggy_of is only meaningful on buggy rules",
                )
            )

    referenced: set[str] = set()
    for q in kb.questions:
        referenced.update(q.allowed_productions)

        recorded = _solved(q.initial, q.unknown)
        if recorded != q.final_answer:
            findings.append(
                Finding(
                    "FinalAnswerMismatch",
                    CRITICAL,
                    q.id,
                    "final_answer does not equal the solution of the initial line",
                )
            )

        best = None
        for s in q.strategies:
            referenced.update(step.production_id for step in s.expected)
            for step in s.expected:
                if (
                    kb.has_production(step.production_id)
                    and kb.production(step.production_id).kind is not ProductionKind.CORRECT
                ):
                    findings.append(
                        Finding(
                            "StrategyUsesBuggy",
                            CRITICAL,
                            f"{q.id}/{s.id}",
                            f"strategy step {step.production_id} is not a correct rule",
                        )
                    )
                if step.production_id not in q.allowed_productions:
                    findings.append(
                        Finding(
                            "StrategyStepNotAllowed",
                            WARNING,
                            f"{q.id}/{s.id}",
                            f"strategy step {step.production_id} is missing from allowed_productions",
                        )
                    )
            total = _strategy_mark_total(kb, s)
            if total is not None:
                best = total if best is None else max(best, total)
            if not replay_strategy(kb, q, s):
                findings.append(
                    Finding(
                        "StrategyUnreachable",
                        CRITICAL,
                        f"{q.id}/{s.id}",
                        "replaying the strategy from the initial line does not reach the final answer",
                    )
                )
        if best is not None and best != q.max_marks:
            findings.append(
                Finding(
                    "MarksMismatch",
                    CRITICAL,
                    q.id,
                    f"max_marks is {q.max_marks} but the best strategy totals {best}",
                )
            )
        if not q.strategies:
            findings.append(
                Finding("NoStrategies", CRITICAL, q.id, "question declares no strategies")
            )

    for p in kb.productions:
        if p.id not in referenced:
            findings.append(
                Finding(
                    "UnusedProduction",
                    WARNING,
                    p.id,
                    "no question allows or expects this rule",
                )
            )

    return ValidationReport(tuple(findings))


def _checked(kb: KnowledgeBase) -> KnowledgeBase:
    report = validate_kb(kb)
    if not report.ok:
        raise ValidationRejectedError(report.to_jsonable())
    return kb


def upsert_question(kb: KnowledgeBase, question: Question) -> KnowledgeBase:
    return _checked(kb.with_question(question))


def upsert_production(kb: KnowledgeBase, production: Production) -> KnowledgeBase:
    return _checked(kb.with_production(production))
