"""Rule and question store: models, file format, operator semantics, checks."""
from .io import (
    OPERATOR_JSON,
    OPERATOR_NAMES,
    kb_from_jsonable,
    kb_to_jsonable,
    load_kb,
    production_from_jsonable,
    question_from_jsonable,
    save_kb,
)
from .models import (
    BUGGY_OPERATORS,
    CONSTANT_PARAM_OPERATORS,
    CORRECT_OPERATORS,
    MAX_INFER_CANDIDATES,
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
from .transforms import (
    additive_terms,
    apply_production,
    build_sum,
    collect_like,
    infer_params,
    negate,
    scale,
    split_coefficient,
)
from .validate import (
    CRITICAL,
    WARNING,
    Finding,
    ValidationReport,
    replay_strategy,
    upsert_production,
    upsert_question,
    validate_kb,
)

__all__ = [
    "BUGGY_OPERATORS",
    "CONSTANT_PARAM_OPERATORS",
    "CORRECT_OPERATORS",
    "CRITICAL",
    "Finding",
    "KnowledgeBase",
    "MAX_INFER_CANDIDATES",
    "MAX_MARK_PER_PRODUCTION",
    "OPERATOR_JSON",
    "OPERATOR_NAMES",
    "Operator",
    "PARAMETRIC_OPERATORS",
    "Production",
    "ProductionKind",
    "Question",
    "QuestionSettings",
    "Strategy",
    "StrategyStep",
    "ValidationReport",
    "WARNING",
    "additive_terms",
    "apply_production",
    "build_sum",
    "collect_like",
    "infer_params",
    "kb_from_jsonable",
    "kb_to_jsonable",
    "load_kb",
    "production_from_jsonable",
    "question_from_jsonable",
    "negate",
    "replay_strategy",
    "save_kb",
    "scale",
    "split_coefficient",
    "upsert_production",
    "upsert_question",
    "validate_kb",
]
