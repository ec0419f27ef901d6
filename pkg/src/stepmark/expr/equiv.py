"""Equivalence decisions.

Expression equivalence runs two independent routes: exact coefficient-map
comparison when both sides convert to polynomials, otherwise exact evaluation
at seeded random rational sample points (poles rejected). Both routes are
kept callable on their own so they can be cross-checked.

Equation equivalence compares solution sets where solving is possible and
falls back to a nonzero-scalar-multiple test on the difference polynomials.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from ..errors import (
    DegreeLimitError,
    EquivUndecidableError,
    NotEquationError,
    NotPolynomialError,
    UnsupportedDegreeError,
)
from .nodes import Equation, Expr, MathLine, Neg, RootsLine, Sum, evaluate, normalize, variables
from .poly import to_polynomial
from .sets import ALL_REALS, SolutionSet
from .solve import solution_set

SAMPLING_SEED = 271_828  # fixed so every grading run samples the same points
SAMPLE_POINTS = 50
MAX_DRAWS = 500  # >90% pole hits across these draws → undecidable
SAMPLE_RANGE = 100


def equiv_by_coefficients(a: Expr, b: Expr, variable: str) -> bool | None:
    """Coefficient-map route. None when either side has no polynomial form."""
    try:
        pa = to_polynomial(a, variable)
        pb = to_polynomial(b, variable)
    except DegreeLimitError:
        return None
    if pa is None or pb is None:
        return None
    return pa.coeffs == pb.coeffs


def _sample_value(rng: random.Random) -> Fraction:
    den = rng.randint(1, 100)
    return Fraction(rng.randint(-SAMPLE_RANGE * den, SAMPLE_RANGE * den), den)


def equiv_by_sampling(a: Expr, b: Expr, seed: int = SAMPLING_SEED) -> bool:
    """Pointwise route: exact evaluation at seeded random rationals in ±100."""
    rng = random.Random(seed)
    names = sorted(variables(a) | variables(b))
    clean = 0
    for _ in range(MAX_DRAWS):
        env = {name: _sample_value(rng) for name in names}
        try:
            if evaluate(a, env) != evaluate(b, env):
                return False
        except ZeroDivisionError:
            continue
        clean += 1
        if clean >= SAMPLE_POINTS:
            return True
    raise EquivUndecidableError(
        f"fewer than {SAMPLE_POINTS} of {MAX_DRAWS} sample points avoided poles"
    )


def expr_equiv(a: Expr, b: Expr) -> bool:
    """Dual-route equivalence; may raise EquivUndecidableError on degenerate input."""
    names = sorted(variables(a) | variables(b))
    if len(names) <= 1:
        by_poly = equiv_by_coefficients(a, b, names[0] if names else "x")
        if by_poly is not None:
            return by_poly
    return equiv_by_sampling(a, b)


SAME_SOLUTION_SET = "same_solution_set"
ROOTS_GAINED = "roots_gained"
ROOTS_LOST = "roots_lost"
NOT_EQUIV = "not_equiv"
UNDECIDABLE = "undecidable"


@dataclass(frozen=True)
class EquivVerdict:
    kind: str
    # roots gained/lost going from the first line to the second; None when the
    # difference is not enumerable (AllReals transitions)
    roots: frozenset | None = None


def _try_solution_set(line: MathLine, variable: str) -> SolutionSet | None:
    try:
        return solution_set(line, variable)
    except (NotPolynomialError, UnsupportedDegreeError, NotEquationError, DegreeLimitError):
        return None


def _compare_sets(s1: SolutionSet, s2: SolutionSet) -> EquivVerdict:
    if s1 == s2:
        return EquivVerdict(SAME_SOLUTION_SET)
    if s1.kind == ALL_REALS or s2.kind == ALL_REALS:
        kind = ROOTS_GAINED if s2.kind == ALL_REALS else ROOTS_LOST
        return EquivVerdict(kind, None)
    r1, r2 = set(s1.roots), set(s2.roots)
    if r1 < r2:
        return EquivVerdict(ROOTS_GAINED, frozenset(r2 - r1))
    if r2 < r1:
        return EquivVerdict(ROOTS_LOST, frozenset(r1 - r2))
    return EquivVerdict(NOT_EQUIV)


def _difference_poly(line: MathLine, variable: str):
    if not isinstance(line, Equation):
        return None
    try:
        return to_polynomial(normalize(Sum((line.lhs, Neg(line.rhs)))), variable)
    except DegreeLimitError:
        return None


def equation_equiv(line1: MathLine, line2: MathLine, variable: str) -> EquivVerdict:
    """Verdict on how line2's solutions relate to line1's."""
    s1 = _try_solution_set(line1, variable)
    s2 = _try_solution_set(line2, variable)
    if s1 is not None and s2 is not None:
        return _compare_sets(s1, s2)
    # degree > 2 (or one side unsolvable): scalar-multiple test on differences
    d1 = _difference_poly(line1, variable)
    d2 = _difference_poly(line2, variable)
    if d1 is None or d2 is None:
        return EquivVerdict(UNDECIDABLE)
    if d1.proportional_to(d2):
        return EquivVerdict(SAME_SOLUTION_SET)
    return EquivVerdict(NOT_EQUIV)
