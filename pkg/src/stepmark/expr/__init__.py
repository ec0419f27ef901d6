"""Exact expression engine: parsing, normal forms, polynomials, solving,
equivalence. Everything downstream (rules, tracer, sessions) builds on this."""
from .equiv import (
    NOT_EQUIV,
    ROOTS_GAINED,
    ROOTS_LOST,
    SAME_SOLUTION_SET,
    SAMPLING_SEED,
    UNDECIDABLE,
    EquivVerdict,
    equation_equiv,
    equiv_by_coefficients,
    equiv_by_sampling,
    expr_equiv,
)
from .nodes import (
    ONE,
    ZERO,
    Equation,
    Expr,
    Expression,
    MathLine,
    Neg,
    Num,
    Power,
    Product,
    RootsLine,
    Sum,
    Var,
    evaluate,
    line_variables,
    lines_match,
    normalize,
    normalize_line,
    num,
    render,
    render_line,
    struct_key,
    syntactic_degree,
    variables,
)
from .parser import MAX_INPUT_LENGTH, parse_expr, parse_line
from .poly import DEGREE_LIMIT, CanonicalPoly, to_polynomial
from .sets import (
    FINITE,
    EMPTY,
    ALL_REALS,
    RootValue,
    SolutionSet,
    SurdRoot,
    all_reals,
    empty,
    exact_sqrt,
    finite,
    quadratic_roots,
    render_root,
    root_from_jsonable,
    root_to_jsonable,
    set_from_jsonable,
    set_to_jsonable,
    square_free_split,
    surd_pair,
)
from .solve import solution_set, solve, stated_solution, substitute_check

__all__ = [
    "syntactic_degree",
    "surd_pair",
    "struct_key",
    "square_free_split",
    "root_to_jsonable",
    "root_from_jsonable",
    "render_root",
    "quadratic_roots",
    "exact_sqrt",
    "ZERO",
    "RootValue",
    "ONE",
    "FINITE",
    "EMPTY",
    "ALL_REALS",
    "CanonicalPoly",
    "DEGREE_LIMIT",
    "Equation",
    "EquivVerdict",
    "Expr",
    "Expression",
    "MAX_INPUT_LENGTH",
    "MathLine",
    "NOT_EQUIV",
    "Neg",
    "Num",
    "Power",
    "Product",
    "ROOTS_GAINED",
    "ROOTS_LOST",
    "RootsLine",
    "SAME_SOLUTION_SET",
    "SAMPLING_SEED",
    "SolutionSet",
    "Sum",
    "SurdRoot",
    "UNDECIDABLE",
    "Var",
    "all_reals",
    "empty",
    "equation_equiv",
    "equiv_by_coefficients",
    "equiv_by_sampling",
    "evaluate",
    "expr_equiv",
    "finite",
    "line_variables",
    "lines_match",
    "normalize",
    "normalize_line",
    "num",
    "parse_expr",
    "parse_line",
    "render",
    "render_line",
    "set_from_jsonable",
    "set_to_jsonable",
    "solution_set",
    "solve",
    "stated_solution",
    "substitute_check",
    "to_polynomial",
    "variables",
]
