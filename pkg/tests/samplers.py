"""Seeded random generators shared by property tests.

Everything here uses explicit `random.Random(seed)` streams so failures are
reproducible and the acceptance counts (1000 pairs, 200 traces) are stable.
"""
from __future__ import annotations

import random
from fractions import Fraction

from stepmark.expr import Equation, Num, Product, Sum, Var, normalize, normalize_line

MAX_COEFF = 9


def _nonzero(rng: random.Random, lo: int = -MAX_COEFF, hi: int = MAX_COEFF) -> int:
    while True:
        v = rng.randint(lo, hi)
        if v != 0:
            return v


def random_fraction(rng: random.Random, denom_max: int = 4) -> Fraction:
    return Fraction(rng.randint(-MAX_COEFF, MAX_COEFF), rng.randint(1, denom_max))


def random_polynomial_coeffs(rng: random.Random, degree: int) -> list[Fraction]:
    """Dense coefficient list c0..c_degree with nonzero leading coefficient."""
    coeffs = [random_fraction(rng) for _ in range(degree)]
    lead = random_fraction(rng)
    while lead == 0:
        lead = random_fraction(rng)
    return coeffs + [lead]


def poly_expr(coeffs: list[Fraction], unknown: str = "x"):
    """Expression for sum(c_k * x^k), normalized."""
    terms = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        if k == 0:
            terms.append(Num(c))
        else:
            power = Var(unknown)
            for _ in range(k - 1):
                power = Product((power, Var(unknown)))
            terms.append(Product((Num(c), power)) if c != 1 else power)
    if not terms:
        return Num(Fraction(0))
    return normalize(Sum(tuple(terms)))


def random_linear_equation(rng: random.Random, unknown: str = "x") -> tuple[Equation, Fraction]:
    """a*x + b = c with a != 0, integer coefficients; returns (equation, root)."""
    a = _nonzero(rng)
    b = rng.randint(-20, 20)
    c = rng.randint(-20, 20)
    lhs = Sum((Product((Num(Fraction(a)), Var(unknown))), Num(Fraction(b))))
    return normalize_line(Equation(lhs, Num(Fraction(c)))), Fraction(c - b, a)


def random_monic_quadratic(rng: random.Random, unknown: str = "x") -> tuple[Equation, int, int]:
    """(x - r1)(x - r2) expanded and set to zero; returns (equation, r1, r2)."""
    r1 = rng.randint(-6, 6)
    r2 = rng.randint(-6, 6)
    b = -(r1 + r2)
    c = r1 * r2
    x = Var(unknown)
    terms = [Product((x, x))]
    if b:
        terms.append(Product((Num(Fraction(b)), x)))
    if c:
        terms.append(Num(Fraction(c)))
    return normalize_line(Equation(Sum(tuple(terms)), Num(Fraction(0)))), r1, r2


def random_expr(rng: random.Random, depth: int = 3, unknown: str = "x"):
    """Random raw AST (pre-normalization) over one unknown."""
    from stepmark.expr import Neg, Power

    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Var(unknown)
        return Num(random_fraction(rng))
    kind = rng.randrange(4)
    if kind == 0:
        n = rng.randint(2, 4)
        return Sum(tuple(random_expr(rng, depth - 1, unknown) for _ in range(n)))
    if kind == 1:
        n = rng.randint(2, 3)
        return Product(tuple(random_expr(rng, depth - 1, unknown) for _ in range(n)))
    if kind == 2:
        return Neg(random_expr(rng, depth - 1, unknown))
    return Power(random_expr(rng, depth - 1, unknown), rng.randint(0, 3))


def random_line(rng: random.Random, unknown: str = "x"):
    """Random normalized MathLine: expression, equation, or rational roots line."""
    from stepmark.expr import Expression, RootsLine, finite

    roll = rng.random()
    if roll < 0.15:
        return normalize_line(Expression(random_expr(rng, 2, unknown)))
    if roll < 0.25:
        roots = [random_fraction(rng) for _ in range(rng.randint(1, 2))]
        return normalize_line(RootsLine(unknown, finite(roots)))
    return normalize_line(
        Equation(random_expr(rng, 2, unknown), random_expr(rng, 2, unknown))
    )


def random_factored_quadratic(rng: random.Random, unknown: str = "x") -> tuple[Equation, int, int]:
    """(x - r1)(x - r2) = 0 in factored form."""
    r1 = rng.randint(-6, 6)
    r2 = rng.randint(-6, 6)
    x = Var(unknown)

    def factor(r: int):
        if r == 0:
            return x
        return Sum((x, Num(Fraction(-r))))

    lhs = Product((factor(r1), factor(r2)))
    return normalize_line(Equation(lhs, Num(Fraction(0)))), r1, r2
