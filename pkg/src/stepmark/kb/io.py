"""Knowledge-base file format: a single JSON document, loaded strictly.

Shape: {"version": str, "productions": [...], "questions": [...]}. Math lines
and rule parameters are grammar strings; answer sets use the solution-set JSON
shape. docs/kb-format.md and docs/kb.schema.json describe the format for
authors; this module is the executable definition.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ..errors import KbFormatError, KbReferenceError, ParseError
from ..expr import (
    MathLine,
    normalize,
    normalize_line,
    parse_expr,
    parse_line,
    render,
    render_line,
    set_from_jsonable,
    set_to_jsonable,
)
from .models import (
    BUGGY_OPERATORS,
    CONSTANT_PARAM_OPERATORS,
    MAX_MARK_PER_PRODUCTION,
    PARAMETRIC_OPERATORS,
    KnowledgeBase,
    Operator,
    Production,
    ProductionKind,
    Question,
    QuestionSettings,
    Strategy,
    StrategyStep,
)

# JSON spelling of each operator (CamelCase) <-> runtime enum
OPERATOR_NAMES: dict[str, Operator] = {
    "AddBothSides": Operator.ADD_BOTH_SIDES,
    "SubBothSides": Operator.SUB_BOTH_SIDES,
    "MulBothSides": Operator.MUL_BOTH_SIDES,
    "DivBothSides": Operator.DIV_BOTH_SIDES,
    "MoveTermAcross": Operator.MOVE_TERM_ACROSS,
    "CollectLikeTerms": Operator.COLLECT_LIKE_TERMS,
    "Expand": Operator.EXPAND,
    "FactorQuadratic": Operator.FACTOR_QUADRATIC,
    "ZeroProductRoots": Operator.ZERO_PRODUCT_ROOTS,
    "QuadraticFormula": Operator.QUADRATIC_FORMULA,
    "SimplifyRatio": Operator.SIMPLIFY_RATIO,
    "RewriteEquivalent": Operator.REWRITE_EQUIVALENT,
    "MoveTermNoSignFlip": Operator.MOVE_TERM_NO_SIGN_FLIP,
    "DistributeFirstTermOnly": Operator.DISTRIBUTE_FIRST_TERM_ONLY,
    "DivideOneSideOnly": Operator.DIVIDE_ONE_SIDE_ONLY,
    "QuadraticFormulaSignError": Operator.QUADRATIC_FORMULA_SIGN_ERROR,
    "CancelAdditiveTerm": Operator.CANCEL_ADDITIVE_TERM,
}
OPERATOR_JSON = {op: name for name, op in OPERATOR_NAMES.items()}


class _Problems:
    def __init__(self) -> None:
        self.items: list[str] = []

    def add(self, location: str, message: str) -> None:
        self.items.append(f"{location}: {message}")

    def raise_if_any(self) -> None:
        if self.items:
            raise KbFormatError(self.items)


def _expect(obj: Any, key: str, kind: type, location: str, problems: _Problems, default=None):
    if not isinstance(obj, dict) or key not in obj:
        problems.add(location, f"missing field {key!r}")
        return default
    value = obj[key]
    if kind is int and isinstance(value, bool):
        problems.add(location, f"field {key!r} must be an integer")
        return default
    if not isinstance(value, kind):
        problems.add(location, f"field {key!r} must be {kind.__name__}")
        return default
    return value


def _parse_params(raw: Any, location: str, problems: _Problems, unknown: str | None):
    """'infer' -> None; list of grammar strings -> tuple of normalized terms."""
    if raw == "infer":
        return None
    if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
        problems.add(location, "params must be \"infer\" or a list of strings")
        return None
    out = []
    for text in raw:
        try:
            out.append(normalize(parse_expr(text, unknown)))
        except ParseError as exc:
            problems.add(location, f"bad param {text!r}: {exc}")
    return tuple(out)


def _production_from_json(obj: Any, index: int, problems: _Problems) -> Production | None:
    loc = f"productions[{index}]"
    pid = _expect(obj, "id", str, loc, problems, default=f"<{loc}>")
    loc = f"productions[{pid}]"
    name = _expect(obj, "name", str, loc, problems, default="")
    kind_raw = _expect(obj, "kind", str, loc, problems, default="correct")
    transform = _expect(obj, "transform", dict, loc, problems, default={})
    method_mark = _expect(obj, "method_mark", int, loc, problems, default=0)
    accuracy_mark = _expect(obj, "accuracy_mark", int, loc, problems, default=0)
    feedback = _expect(obj, "feedback", str, loc, problems, default="")
    buggy_of = obj.get("buggy_of") if isinstance(obj, dict) else None
    if buggy_of is not None and not isinstance(buggy_of, str):
        problems.add(loc, "buggy_of must be a string when present")
        buggy_of = None

    try:
        kind = ProductionKind(kind_raw.lower())
    except ValueError:
        problems.add(loc, f"kind must be 'correct' or 'buggy', got {kind_raw!r}")
        kind = ProductionKind.CORRECT

    op_name = _expect(transform, "operator", str, f"{loc}.transform", problems, default="")
    operator = OPERATOR_NAMES.get(op_name)
    if operator is None:
        problems.add(f"{loc}.transform", f"unknown operator {op_name!r}")
        return None
    if kind is ProductionKind.CORRECT and operator in BUGGY_OPERATORS:
        problems.add(loc, f"operator {op_name} is a buggy rule but kind is 'correct'")
    if kind is ProductionKind.BUGGY and operator not in BUGGY_OPERATORS:
        problems.add(loc, f"operator {op_name} is a correct rule but kind is 'buggy'")

    params_raw = transform.get("params", "infer") if isinstance(transform, dict) else "infer"
    params = _parse_params(params_raw, f"{loc}.transform.params", problems, unknown=None)
    if params is not None and operator not in PARAMETRIC_OPERATORS and params:
        problems.add(f"{loc}.transform", f"operator {op_name} takes no params")
    if params is not None and operator in PARAMETRIC_OPERATORS and len(params) != 1:
        problems.add(f"{loc}.transform", f"operator {op_name} takes exactly one param")
    if params and operator in CONSTANT_PARAM_OPERATORS:
        from ..expr import Num

        p = params[0]
        if not isinstance(p, Num) or p.value == 0:
            problems.add(
                f"{loc}.transform.params", f"{op_name} requires a nonzero constant param"
            )

    if method_mark is None or method_mark < 0 or accuracy_mark is None or accuracy_mark < 0:
        problems.add(loc, "marks must be non-negative integers")
        method_mark, accuracy_mark = max(method_mark or 0, 0), max(accuracy_mark or 0, 0)
    if method_mark + accuracy_mark > MAX_MARK_PER_PRODUCTION:
        problems.add(loc, f"method_mark + accuracy_mark exceeds {MAX_MARK_PER_PRODUCTION}")

    return Production(
        id=pid,
        name=name,
        kind=kind,
        operator=operator,
        params=params,
        method_mark=method_mark,
        accuracy_mark=accuracy_mark,
        feedback=feedback,
        buggy_of=buggy_of,
    )


def _strategy_from_json(obj: Any, question_id: str, unknown: str, index: int, problems: _Problems) -> Strategy:
    loc = f"questions[{question_id}].strategies[{index}]"
    sid = _expect(obj, "id", str, loc, problems, default=f"<{loc}>")
    label = _expect(obj, "label", str, loc, problems, default="")
    declared_qid = _expect(obj, "question_id", str, loc, problems, default=question_id)
    if declared_qid != question_id:
        problems.add(loc, f"question_id {declared_qid!r} does not match enclosing question")
    raw_steps = _expect(obj, "expected", list, loc, problems, default=[])
    steps: list[StrategyStep] = []
    for i, raw in enumerate(raw_steps or []):
        step_loc = f"{loc}.expected[{i}]"
        pid = _expect(raw, "production", str, step_loc, problems, default="")
        params = None
        if isinstance(raw, dict) and "params" in raw:
            params = _parse_params(raw["params"], f"{step_loc}.params", problems, unknown)
            if params is None:
                problems.add(step_loc, "step params must be a list of strings")
        steps.append(StrategyStep(production_id=pid, params=params))
    if not steps:
        problems.add(loc, "expected must be a non-empty list of steps")
    return Strategy(id=sid, question_id=question_id, label=label, expected=tuple(steps))


def _question_from_json(obj: Any, index: int, problems: _Problems) -> Question | None:
    loc = f"questions[{index}]"
    qid = _expect(obj, "id", str, loc, problems, default=f"<{loc}>")
    loc = f"questions[{qid}]"
    prompt = _expect(obj, "prompt", str, loc, problems, default="")
    unknown = _expect(obj, "unknown", str, loc, problems, default="x")
    initial_text = _expect(obj, "initial", str, loc, problems)
    max_marks = _expect(obj, "max_marks", int, loc, problems, default=0)
    answer_raw = _expect(obj, "final_answer", dict, loc, problems, default=None)
    allowed = _expect(obj, "allowed_productions", list, loc, problems, default=[])
    raw_strategies = _expect(obj, "strategies", list, loc, problems, default=[])

    initial: MathLine | None = None
    if initial_text is not None:
        try:
            initial = normalize_line(parse_line(initial_text, unknown))
        except ParseError as exc:
            problems.add(f"{loc}.initial", str(exc))
    if initial is None:
        return None

    if answer_raw is None:
        return None
    try:
        final_answer = set_from_jsonable(answer_raw)
    except (KeyError, ValueError, TypeError) as exc:
        problems.add(f"{loc}.final_answer", f"bad solution set: {exc}")
        return None

    if not all(isinstance(p, str) for p in (allowed or [])):
        problems.add(f"{loc}.allowed_productions", "must be a list of production ids")
        allowed = [p for p in allowed if isinstance(p, str)]

    settings_raw = obj.get("settings", {}) if isinstance(obj, dict) else {}
    if not isinstance(settings_raw, dict):
        problems.add(f"{loc}.settings", "must be an object")
        settings_raw = {}
    defaults = QuestionSettings()
    settings = QuestionSettings(
        composition_depth=settings_raw.get("composition_depth", defaults.composition_depth),
        generic_equiv_credit=settings_raw.get(
            "generic_equiv_credit", defaults.generic_equiv_credit
        ),
        buggy_method_credit=settings_raw.get(
            "buggy_method_credit", defaults.buggy_method_credit
        ),
    )
    if not isinstance(settings.composition_depth, int) or isinstance(
        settings.composition_depth, bool
    ):
        problems.add(f"{loc}.settings.composition_depth", "must be an integer")
        settings = QuestionSettings()
    strategies = tuple(
        _strategy_from_json(raw, qid, unknown, i, problems)
        for i, raw in enumerate(raw_strategies or [])
    )
    if max_marks is None or max_marks <= 0:
        problems.add(loc, "max_marks must be a positive integer")
        max_marks = 1

    return Question(
        id=qid,
        prompt=prompt,
        initial=initial,
        unknown=unknown,
        final_answer=final_answer,
        max_marks=max_marks,
        strategies=strategies,
        allowed_productions=tuple(allowed or []),
        settings=settings,
    )


def kb_from_jsonable(doc: Any) -> KnowledgeBase:
    problems = _Problems()
    if not isinstance(doc, dict):
        raise KbFormatError(["document: top level must be a JSON object"])
    version = _expect(doc, "version", str, "document", problems, default="0")
    raw_productions = _expect(doc, "productions", list, "document", problems, default=[])
    raw_questions = _expect(doc, "questions", list, "document", problems, default=[])

    productions: list[Production] = []
    for i, raw in enumerate(raw_productions or []):
        p = _production_from_json(raw, i, problems)
        if p is not None:
            productions.append(p)
    questions: list[Question] = []
    for i, raw in enumerate(raw_questions or []):
        q = _question_from_json(raw, i, problems)
        if q is not None:
            questions.append(q)

    ids = [p.id for p in productions]
    for dup in {i for i in ids if ids.count(i) > 1}:
        problems.add(f"productions[{dup}]", "duplicate production id")
    qids = [q.id for q in questions]
    for dup in {i for i in qids if qids.count(i) > 1}:
        problems.add(f"questions[{dup}]", "duplicate question id")

    problems.raise_if_any()

    kb = KnowledgeBase(
        version=version, productions=tuple(productions), questions=tuple(questions)
    )
    _check_references(kb)
    return kb


def production_from_jsonable(obj: Any) -> Production:
    """Parse a single production fragment (used by the authoring endpoints)."""
    problems = _Problems()
    if not isinstance(obj, dict):
        raise KbFormatError(["production: must be a JSON object"])
    production = _production_from_json(obj, 0, problems)
    problems.raise_if_any()
    assert production is not None
    return production


def question_from_jsonable(obj: Any) -> Question:
    """Parse a single question fragment (used by the authoring endpoints)."""
    problems = _Problems()
    if not isinstance(obj, dict):
        raise KbFormatError(["question: must be a JSON object"])
    question = _question_from_json(obj, 0, problems)
    problems.raise_if_any()
    assert question is not None
    return question


def _check_references(kb: KnowledgeBase) -> None:
    known = {p.id for p in kb.productions}
    for p in kb.productions:
        if p.buggy_of is not None and p.buggy_of and p.buggy_of not in known:
            raise KbReferenceError(p.buggy_of, f"productions[{p.id}].buggy_of")
    for q in kb.questions:
        for pid in q.allowed_productions:
            if pid not in known:
                raise KbReferenceError(pid, f"questions[{q.id}].allowed_productions")
        for s in q.strategies:
            for i, step in enumerate(s.expected):
                if step.production_id not in known:
                    raise KbReferenceError(
                        step.production_id, f"questions[{q.id}].strategies[{s.id}].expected[{i}]"
                    )


def load_kb(path: str | Path) -> KnowledgeBase:
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise KbFormatError(["document: file is empty"])
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise KbFormatError([f"document: invalid JSON: {exc}"]) from exc
    return kb_from_jsonable(doc)


# ---------------------------------------------------------------------------
# serialization

def _production_to_json(p: Production) -> dict:
    transform: dict[str, Any] = {"operator": OPERATOR_JSON[p.operator]}
    transform["params"] = (
        "infer" if p.params is None else [render(e) for e in p.params]
    )
    out = {
        "id": p.id,
        "name": p.name,
        "kind": p.kind.value,
        "transform": transform,
        "method_mark": p.method_mark,
        "accuracy_mark": p.accuracy_mark,
        "feedback": p.feedback,
    }
    if p.buggy_of is not None:
        out["buggy_of"] = p.buggy_of
    return out


def _question_to_json(q: Question) -> dict:
    return {
        "id": q.id,
        "prompt": q.prompt,
        "initial": render_line(q.initial),
        "unknown": q.unknown,
        "final_answer": set_to_jsonable(q.final_answer),
        "max_marks": q.max_marks,
        "strategies": [
            {
                "id": s.id,
                "question_id": s.question_id,
                "label": s.label,
                "expected": [
                    {"production": step.production_id}
                    if step.params is None
                    else {
                        "production": step.production_id,
                        "params": [render(e) for e in step.params],
                    }
                    for step in s.expected
                ],
            }
            for s in q.strategies
        ],
        "allowed_productions": list(q.allowed_productions),
        "settings": {
            "composition_depth": q.settings.composition_depth,
            "generic_equiv_credit": q.settings.generic_equiv_credit,
            "buggy_method_credit": q.settings.buggy_method_credit,
        },
    }


def kb_to_jsonable(kb: KnowledgeBase) -> dict:
    return {
        "version": kb.version,
        "productions": [_production_to_json(p) for p in kb.productions],
        "questions": [_question_to_json(q) for q in kb.questions],
    }


def save_kb(kb: KnowledgeBase, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(kb_to_jsonable(kb), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
