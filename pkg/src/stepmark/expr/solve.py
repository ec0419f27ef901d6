"""Exact solving for linear and quadratic lines of working."""
from __future__ import annotations

from fractions import Fraction

from ..errors import NotEquationError, NotPolynomialError, UnsupportedDegreeError
from . import sets
from .nodes import Equation, Expression, MathLine, Neg, Num, RootsLine, Sum, Var, normalize
from .poly import to_polynomial
from .sets import SolutionSet


def solve(equation: Equation, variable: str) -> SolutionSet:
    """Solution set of lhs = rhs over the reals.

    Raises NotPolynomialError when the difference has no polynomial form and
    UnsupportedDegreeError above degree 2.
    """
    diff = normalize(Sum((equation.lhs, Neg(equation.rhs))))
    poly = to_polynomial(diff, variable)
    if poly is None:
        raise NotPolynomialError(f"no polynomial form in {variable!r}")
    degree = poly.degree
    if degree <= 0:
        return sets.all_reals() if poly.is_zero else sets.empty()
    if degree == 1:
        return sets.finite([-poly.coeff(0) / poly.coeff(1)])
    if degree == 2:
        return sets.quadratic_roots(poly.coeff(2), poly.coeff(1), poly.coeff(0))
    raise UnsupportedDegreeError(degree)


def solution_set(line: MathLine, variable: str) -> SolutionSet:
    """Solution set of any solvable line; RootsLines carry theirs directly."""
    match line:
        case RootsLine(_, roots):
            return roots
        case Equation():
            return solve(line, variable)
        case Expression():
            raise NotEquationError("a bare expression has no solution set")
    raise TypeError(f"not a MathLine: {line!r}")


def stated_solution(line: MathLine, variable: str) -> SolutionSet | None:
    """The answer a line explicitly states, or None if it is not in answer form.

    Answer form is a roots line ("x = 2 or x = 3") or an equation isolating the
    variable against a constant ("x = 5"). A line merely equivalent to the
    answer ("3x = 15") states nothing — it is still working.
    """
    match line:
        case RootsLine(unknown, roots):
            return roots if unknown == variable else None
        case Equation(lhs, rhs):
            for isolated, value in ((lhs, rhs), (rhs, lhs)):
                if isolated == Var(variable) and isinstance(value, Num):
                    return sets.finite([value.value])
    return None


def substitute_check(equation: Equation, variable: str, value: Fraction) -> bool:
    """Exact check that `value` satisfies the equation (poles count as failure)."""
    from .nodes import evaluate

    try:
        lhs = evaluate(equation.lhs, {variable: value})
        rhs = evaluate(equation.rhs, {variable: value})
    except ZeroDivisionError:
        return False
    return lhs == rhs
