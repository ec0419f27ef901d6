"""Forward-chaining model tracer.

Each submitted line is classified against the student's own current premise by
searching the question's allowed rules (singly, and in short compositions
drawn from declared strategy windows), then marked for method and accuracy.
Work built on an earlier wrong line still earns full credit (follow-through).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction

from .errors import ParseError, SubmissionRejectedError
from .expr import (
    SAMPLING_SEED,
    SAME_SOLUTION_SET,
    Equation,
    Expr,
    Expression,
    MathLine,
    Num,
    Power,
    Product,
    RootsLine,
    SolutionSet,
    Sum,
    Var,
    equation_equiv,
    lines_match,
    normalize_line,
    parse_line,
    render,
    render_line,
    stated_solution,
)
from .kb import (
    KnowledgeBase,
    Operator,
    Production,
    ProductionKind,
    Question,
    apply_production,
    infer_params,
)

ENGINE_SEED = SAMPLING_SEED  # recorded in every transcript

NO_MATCHING_KNOWLEDGE = "NoMatchingKnowledge"


class Classification(str, Enum):
    CORRECT_METHOD = "CorrectMethod"
    CORRECT_METHOD_WRONG_ARITHMETIC = "CorrectMethodWrongArithmetic"
    KNOWN_ERROR = "KnownError"
    COMPOSITION = "Composition"
    RESTATEMENT = "Restatement"
    VALID_UNRECOGNIZED_TRANSFORM = "ValidUnrecognizedTransform"
    UNRECOGNIZED = "Unrecognized"


@dataclass(frozen=True)
class MatchedProduction:
    production_id: str
    params: tuple[Expr, ...]

    def rendered_params(self) -> tuple[str, ...]:
        return tuple(render(p) for p in self.params)


@dataclass(frozen=True)
class StepAssessment:
    classification: Classification
    matched: tuple[MatchedProduction, ...]
    method_awarded: int
    accuracy_awarded: int
    follow_through: bool
    ambiguous: bool
    feedback: str = ""
    reason: str | None = None

    @property
    def awarded(self) -> int:
        return self.method_awarded + self.accuracy_awarded


@dataclass(frozen=True)
class StepRecord:
    index: int
    submitted_text: str
    line: MathLine
    assessment: StepAssessment


@dataclass(frozen=True)
class Blackboard:
    question_id: str
    premise: MathLine
    on_track: bool
    steps: tuple[StepRecord, ...]
    earned_method: int
    earned_accuracy: int

    @property
    def earned(self) -> int:
        return self.earned_method + self.earned_accuracy


@dataclass(frozen=True)
class FinalReport:
    earned_method: int
    earned_accuracy: int
    max_marks: int
    reached_correct_final: bool
    strategy_attribution: str

    @property
    def earned(self) -> int:
        return self.earned_method + self.earned_accuracy


UNATTRIBUTED = "Unattributed"


def new_blackboard(question: Question) -> Blackboard:
    return Blackboard(
        question_id=question.id,
        premise=question.initial,
        on_track=True,
        steps=(),
        earned_method=0,
        earned_accuracy=0,
    )


# ---------------------------------------------------------------------------
# candidate enumeration

@dataclass(frozen=True)
class _Candidate:
    seq: tuple[MatchedProduction, ...]
    result: MathLine
    method: int
    accuracy: int

    def key(self):
        return (
            tuple(m.production_id for m in self.seq),
            tuple(m.rendered_params() for m in self.seq),
            render_line(self.result),
        )


def _param_choices(
    production: Production, pinned: tuple | None, premise: MathLine
) -> list[tuple[Expr, ...]]:
    if pinned is not None:
        return [pinned]
    if production.params is not None:
        return [production.params]
    return infer_params(production, premise) or [()]


def _single_candidates(
    kb: KnowledgeBase, question: Question, premise: MathLine, kind: ProductionKind
) -> list[_Candidate]:
    out: list[_Candidate] = []
    for pid in question.allowed_productions:
        if not kb.has_production(pid):
            continue
        production = kb.production(pid)
        if production.kind is not kind:
            continue
        if production.operator is Operator.REWRITE_EQUIVALENT:
            continue  # credit marker, not a searchable rewrite
        for params in _param_choices(production, None, premise):
            result = apply_production(production, params, premise)
            if result is not None:
                out.append(
                    _Candidate(
                        seq=(MatchedProduction(pid, params),),
                        result=result,
                        method=production.method_mark,
                        accuracy=production.accuracy_mark,
                    )
                )
    return out


def _window_candidates(
    kb: KnowledgeBase, question: Question, premise: MathLine
) -> list[_Candidate]:
    """Compositions: contiguous windows of declared strategies, depth-bounded."""
    depth = question.settings.composition_depth
    out: list[_Candidate] = []
    for strategy in question.strategies:
        expected = strategy.expected
        for length in range(2, min(depth, len(expected)) + 1):
            for start in range(len(expected) - length + 1):
                window = expected[start : start + length]

                def walk(prem: MathLine, i: int, acc: tuple[MatchedProduction, ...]) -> None:
                    if i == len(window):
                        out.append(
                            _Candidate(
                                seq=acc,
                                result=prem,
                                method=sum(
                                    kb.production(m.production_id).method_mark for m in acc
                                ),
                                accuracy=sum(
                                    kb.production(m.production_id).accuracy_mark for m in acc
                                ),
                            )
                        )
                        return
                    step = window[i]
                    if not kb.has_production(step.production_id):
                        return
                    production = kb.production(step.production_id)
                    if production.kind is not ProductionKind.CORRECT:
                        return
                    for params in _param_choices(production, step.params, prem):
                        result = apply_production(production, params, prem)
                        if result is not None:
                            walk(result, i + 1, acc + (MatchedProduction(step.production_id, params),))

                walk(premise, 0, ())
    return out


def _dedup(candidates: list[_Candidate]) -> list[_Candidate]:
    seen: set = set()
    out = []
    for c in candidates:
        k = c.key()
        if k not in seen:
            seen.add(k)
            out.append(c)
    return out


def _strategy_rank(question: Question):
    position: dict[str, tuple[int, int]] = {}
    for si, strategy in enumerate(question.strategies):
        for pi, step in enumerate(strategy.expected):
            position.setdefault(step.production_id, (si, pi))
    worst = (len(question.strategies), 1_000_000)

    def rank(candidate: _Candidate):
        return tuple(position.get(m.production_id, worst) for m in candidate.seq)

    return rank


def _pick(question: Question, candidates: list[_Candidate], mark_of) -> tuple[_Candidate, bool]:
    """Tie-break: marks desc, fewest rules, earliest strategy rank, lexical ids."""
    rank = _strategy_rank(question)
    ordered = sorted(
        candidates,
        key=lambda c: (
            -mark_of(c),
            len(c.seq),
            rank(c),
            tuple(m.production_id for m in c.seq),
            tuple(m.rendered_params() for m in c.seq),
        ),
    )
    return ordered[0], len(ordered) > 1


# ---------------------------------------------------------------------------
# lenient (wrong-arithmetic) shape matching

def literal_values(line: MathLine) -> set[Fraction]:
    values: set[Fraction] = set()

    def walk(e: Expr) -> None:
        match e:
            case Num(value):
                values.add(value)
            case Sum(terms):
                for t in terms:
                    walk(t)
            case Product(factors):
                for f in factors:
                    walk(f)
            case Power(base, _):
                walk(base)
            case _:
                pass

    match line:
        case Expression(expr):
            walk(expr)
        case Equation(lhs, rhs):
            walk(lhs)
            walk(rhs)
        case RootsLine(_, roots):
            if roots.is_finite:
                values.update(r for r in roots.roots if isinstance(r, Fraction))
    return values


def _shape_eq(expected: Expr, actual: Expr, premise_values: set[Fraction]) -> bool:
    """Structural equality, except in freshly-computed literal slots.

    A literal position is a wildcard only when the rule actually computed a
    new number there (expected value absent from the premise) and the student
    likewise wrote a new number (their value absent too). Premise numbers
    copied through a step are load-bearing and must match exactly."""
    match (expected, actual):
        case (Num(a), Num(b)):
            return a == b or (a not in premise_values and b not in premise_values)
        case (Var(a), Var(b)):
            return a == b
        case (Sum(ts1), Sum(ts2)):
            return len(ts1) == len(ts2) and all(
                _shape_eq(t1, t2, premise_values) for t1, t2 in zip(ts1, ts2)
            )
        case (Product(fs1), Product(fs2)):
            return len(fs1) == len(fs2) and all(
                _shape_eq(f1, f2, premise_values) for f1, f2 in zip(fs1, fs2)
            )
        case (Power(b1, e1), Power(b2, e2)):
            return e1 == e2 and _shape_eq(b1, b2, premise_values)
        case _:
            return False


def _roots_shape_eq(expected: SolutionSet, actual: SolutionSet, premise_values) -> bool:
    if not (expected.is_finite and actual.is_finite):
        return expected == actual
    if len(expected.roots) != len(actual.roots):
        return False
    for e, a in zip(expected.roots, actual.roots):
        if e == a:
            continue
        if (
            isinstance(a, Fraction)
            and isinstance(e, Fraction)
            and a not in premise_values
            and e not in premise_values
        ):
            continue
        return False
    return True


def _line_shape_match(expected: MathLine, actual: MathLine, premise_values) -> bool:
    expected, actual = normalize_line(expected), normalize_line(actual)
    match (expected, actual):
        case (Expression(x), Expression(y)):
            return _shape_eq(x, y, premise_values)
        case (Equation(l1, r1), Equation(l2, r2)):
            return (
                _shape_eq(l1, l2, premise_values) and _shape_eq(r1, r2, premise_values)
            ) or (
                _shape_eq(l1, r2, premise_values) and _shape_eq(r1, l2, premise_values)
            )
        case (RootsLine(u1, s1), RootsLine(u2, s2)):
            return u1 == u2 and _roots_shape_eq(s1, s2, premise_values)
    return False


# ---------------------------------------------------------------------------
# the classification cascade

def _cap(bb: Blackboard, question: Question, method: int, accuracy: int) -> tuple[int, int]:
    available = max(question.max_marks - bb.earned, 0)
    m = min(method, available)
    a = min(accuracy, available - m)
    return m, a


def _assessment(
    bb: Blackboard,
    question: Question,
    classification: Classification,
    matched: tuple[MatchedProduction, ...],
    method: int,
    accuracy: int,
    *,
    ambiguous: bool = False,
    feedback: str = "",
    reason: str | None = None,
) -> StepAssessment:
    m, a = _cap(bb, question, method, accuracy)
    return StepAssessment(
        classification=classification,
        matched=matched,
        method_awarded=m,
        accuracy_awarded=a,
        follow_through=(not bb.on_track) and (m + a) > 0,
        ambiguous=ambiguous,
        feedback=feedback,
        reason=reason,
    )


def parse_submission(text: str, question: Question) -> MathLine:
    try:
        return normalize_line(parse_line(text, question.unknown))
    except ParseError as exc:
        raise SubmissionRejectedError(str(exc), exc.offset) from exc


def trace_step(
    bb: Blackboard, submission_text: str, kb: KnowledgeBase, question: Question
) -> StepAssessment:
    line = parse_submission(submission_text, question)

    # (1) restating the premise earns nothing
    if lines_match(line, bb.premise):
        return _assessment(bb, question, Classification.RESTATEMENT, (), 0, 0)

    # (2) exact match against correct rules, singly or as strategy windows
    correct = [
        c
        for c in _dedup(
            _single_candidates(kb, question, bb.premise, ProductionKind.CORRECT)
            + _window_candidates(kb, question, bb.premise)
        )
        if lines_match(c.result, line)
    ]
    if correct:
        winner, ambiguous = _pick(question, correct, lambda c: c.method + c.accuracy)
        classification = (
            Classification.CORRECT_METHOD
            if len(winner.seq) == 1
            else Classification.COMPOSITION
        )
        return _assessment(
            bb,
            question,
            classification,
            winner.seq,
            winner.method,
            winner.accuracy,
            ambiguous=ambiguous,
        )

    # (3) exact match against known-buggy rules (diagnosis beats leniency:
    # a line reproduced exactly by a buggy rule is that error, not arithmetic)
    buggy_credit = question.settings.buggy_method_credit
    buggy = [
        c
        for c in _dedup(_single_candidates(kb, question, bb.premise, ProductionKind.BUGGY))
        if lines_match(c.result, line)
    ]
    if buggy:
        winner, ambiguous = _pick(
            question, buggy, lambda c: c.method if buggy_credit else 0
        )
        production = kb.production(winner.seq[0].production_id)
        return _assessment(
            bb,
            question,
            Classification.KNOWN_ERROR,
            winner.seq,
            production.method_mark if buggy_credit else 0,
            0,
            ambiguous=ambiguous,
            feedback=production.feedback,
        )

    # (4) right shape, wrong numbers: single correct rules with recomputed
    # literals wildcarded; must be unique to count
    premise_values = literal_values(bb.premise)
    lenient = _dedup(
        [
            c
            for c in _single_candidates(kb, question, bb.premise, ProductionKind.CORRECT)
            if _line_shape_match(c.result, line, premise_values)
        ]
    )
    if len(lenient) == 1:
        (winner,) = lenient
        return _assessment(
            bb,
            question,
            Classification.CORRECT_METHOD_WRONG_ARITHMETIC,
            winner.seq,
            winner.method,
            0,
        )

    # (5) optional generic equivalence credit
    if question.settings.generic_equiv_credit:
        verdict = equation_equiv(bb.premise, line, question.unknown)
        if verdict.kind == SAME_SOLUTION_SET:
            marker = next(
                (
                    pid
                    for pid in question.allowed_productions
                    if kb.has_production(pid)
                    and kb.production(pid).operator is Operator.REWRITE_EQUIVALENT
                ),
                None,
            )
            matched = (MatchedProduction(marker, ()),) if marker else ()
            return _assessment(
                bb, question, Classification.VALID_UNRECOGNIZED_TRANSFORM, matched, 1, 0
            )

    # (6) nothing in the knowledge base explains this line
    return _assessment(
        bb,
        question,
        Classification.UNRECOGNIZED,
        (),
        0,
        0,
        reason=NO_MATCHING_KNOWLEDGE,
    )


# ---------------------------------------------------------------------------
# blackboard evolution and final reporting

def update_blackboard(
    bb: Blackboard,
    submission_text: str,
    line: MathLine,
    assessment: StepAssessment,
    question: Question,
) -> Blackboard:
    record = StepRecord(
        index=len(bb.steps) + 1,
        submitted_text=submission_text,
        line=line,
        assessment=assessment,
    )
    verdict = equation_equiv(line, question.initial, question.unknown)
    return replace(
        bb,
        premise=line,
        on_track=verdict.kind == SAME_SOLUTION_SET,
        steps=bb.steps + (record,),
        earned_method=bb.earned_method + assessment.method_awarded,
        earned_accuracy=bb.earned_accuracy + assessment.accuracy_awarded,
    )


def _final_solution(line: MathLine, unknown: str) -> SolutionSet | None:
    # answer-form only: "3x = 15" does not state the answer even though it
    # is equivalent to it; "x = 5" and "x = 2 or x = 3" do
    return stated_solution(line, unknown)


def _attribute_strategy(bb: Blackboard, question: Question) -> str:
    matched = Counter(
        m.production_id for step in bb.steps for m in step.assessment.matched
    )
    best_overlap = 0
    winners: list[str] = []
    for strategy in question.strategies:
        expected = Counter(step.production_id for step in strategy.expected)
        overlap = sum((expected & matched).values())
        if overlap > best_overlap:
            best_overlap, winners = overlap, [strategy.id]
        elif overlap == best_overlap and overlap > 0:
            winners.append(strategy.id)
    if best_overlap > 0 and len(winners) == 1:
        return winners[0]
    return UNATTRIBUTED


def assess_final(bb: Blackboard, question: Question) -> FinalReport:
    reached = False
    if bb.steps:
        reached = (
            _final_solution(bb.steps[-1].line, question.unknown) == question.final_answer
        )
    return FinalReport(
        earned_method=bb.earned_method,
        earned_accuracy=bb.earned_accuracy,
        max_marks=question.max_marks,
        reached_correct_final=reached,
        strategy_attribution=_attribute_strategy(bb, question),
    )


def grade_final_answer_only(question: Question, submission_texts: list[str]) -> int:
    """Baseline grader: all-or-nothing on the last line's solution set."""
    if not submission_texts:
        return 0
    try:
        line = normalize_line(parse_line(submission_texts[-1], question.unknown))
    except ParseError:
        return 0
    if _final_solution(line, question.unknown) == question.final_answer:
        return question.max_marks
    return 0
