"""Knowledge-base data model: transformation rules, strategies, questions."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from enum import Enum

from ..errors import KbReferenceError
from ..expr import MathLine, SolutionSet


class ProductionKind(str, Enum):
    CORRECT = "correct"
    BUGGY = "buggy"


class Operator(str, Enum):
    # correct transformations
    ADD_BOTH_SIDES = "add_both_sides"
    SUB_BOTH_SIDES = "sub_both_sides"
    MUL_BOTH_SIDES = "mul_both_sides"
    DIV_BOTH_SIDES = "div_both_sides"
    MOVE_TERM_ACROSS = "move_term_across"
    COLLECT_LIKE_TERMS = "collect_like_terms"
    EXPAND = "expand"
    FACTOR_QUADRATIC = "factor_quadratic"
    ZERO_PRODUCT_ROOTS = "zero_product_roots"
    QUADRATIC_FORMULA = "quadratic_formula"
    SIMPLIFY_RATIO = "simplify_ratio"
    REWRITE_EQUIVALENT = "rewrite_equivalent"
    # known-buggy twins
    MOVE_TERM_NO_SIGN_FLIP = "move_term_no_sign_flip"
    DISTRIBUTE_FIRST_TERM_ONLY = "distribute_first_term_only"
    DIVIDE_ONE_SIDE_ONLY = "divide_one_side_only"
    QUADRATIC_FORMULA_SIGN_ERROR = "quadratic_formula_sign_error"
    CANCEL_ADDITIVE_TERM = "cancel_additive_term"


CORRECT_OPERATORS = frozenset(
    {
        Operator.ADD_BOTH_SIDES,
        Operator.SUB_BOTH_SIDES,
        Operator.MUL_BOTH_SIDES,
        Operator.DIV_BOTH_SIDES,
        Operator.MOVE_TERM_ACROSS,
        Operator.COLLECT_LIKE_TERMS,
        Operator.EXPAND,
        Operator.FACTOR_QUADRATIC,
        Operator.ZERO_PRODUCT_ROOTS,
        Operator.QUADRATIC_FORMULA,
        Operator.SIMPLIFY_RATIO,
        Operator.REWRITE_EQUIVALENT,
    }
)
BUGGY_OPERATORS = frozenset(set(Operator) - CORRECT_OPERATORS)

# operators taking one term/constant parameter; the rest are parameterless
PARAMETRIC_OPERATORS = frozenset(
    {
        Operator.ADD_BOTH_SIDES,
        Operator.SUB_BOTH_SIDES,
        Operator.MUL_BOTH_SIDES,
        Operator.DIV_BOTH_SIDES,
        Operator.MOVE_TERM_ACROSS,
        Operator.MOVE_TERM_NO_SIGN_FLIP,
        Operator.DIVIDE_ONE_SIDE_ONLY,
    }
)
# parameters restricted to nonzero rational constants
CONSTANT_PARAM_OPERATORS = frozenset(
    {Operator.MUL_BOTH_SIDES, Operator.DIV_BOTH_SIDES, Operator.DIVIDE_ONE_SIDE_ONLY}
)

MAX_MARK_PER_PRODUCTION = 10
MAX_INFER_CANDIDATES = 16

# params: None means "infer from the premise"; otherwise a fixed tuple of Exprs
Params = "tuple | None"


@dataclass(frozen=True)
class Production:
    id: str
    name: str
    kind: ProductionKind
    operator: Operator
    params: tuple | None  # tuple[Expr, ...] when fixed, None = infer
    method_mark: int
    accuracy_mark: int
    feedback: str
    buggy_of: str | None = None


@dataclass(frozen=True)
class StrategyStep:
    production_id: str
    params: tuple | None = None  # pinned params for replay/composition


@dataclass(frozen=True)
class Strategy:
    id: str
    question_id: str
    label: str
    expected: tuple[StrategyStep, ...]


@dataclass(frozen=True)
class QuestionSettings:
    composition_depth: int = 2
    generic_equiv_credit: bool = False
    buggy_method_credit: bool = True


@dataclass(frozen=True)
class Question:
    id: str
    prompt: str
    initial: MathLine
    unknown: str
    final_answer: SolutionSet
    max_marks: int
    strategies: tuple[Strategy, ...]
    allowed_productions: tuple[str, ...]
    settings: QuestionSettings = field(default_factory=QuestionSettings)


@dataclass(frozen=True)
class KnowledgeBase:
    version: str
    productions: tuple[Production, ...]
    questions: tuple[Question, ...]

    def production(self, production_id: str) -> Production:
        for p in self.productions:
            if p.id == production_id:
                return p
        raise KbReferenceError(production_id, "productions")

    def has_production(self, production_id: str) -> bool:
        return any(p.id == production_id for p in self.productions)

    def question(self, question_id: str) -> Question:
        for q in self.questions:
            if q.id == question_id:
                return q
        raise KbReferenceError(question_id, "questions")

    def has_question(self, question_id: str) -> bool:
        return any(q.id == question_id for q in self.questions)

    def fingerprint(self) -> str:
        """Short content digest; transcripts record it next to the version."""
        from .io import kb_to_jsonable

        blob = json.dumps(kb_to_jsonable(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def with_question(self, question: Question) -> "KnowledgeBase":
        if self.has_question(question.id):  # replace in place to keep order stable
            updated = tuple(
                question if q.id == question.id else q for q in self.questions
            )
        else:
            updated = self.questions + (question,)
        return replace(self, questions=updated)

    def with_production(self, production: Production) -> "KnowledgeBase":
        if self.has_production(production.id):
            updated = tuple(
                production if p.id == production.id else p for p in self.productions
            )
        else:
            updated = self.productions + (production,)
        return replace(self, productions=updated)
