"""Solution sets for linear/quadratic equations.

Roots are kept exact: plain `Fraction`s, or a `SurdRoot` (p ± sqrt(q))/r pair
for irrational quadratic roots. A single SurdRoot value stands for *both*
signs of the radical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union


@dataclass(frozen=True, slots=True)
class SurdRoot:
    """The conjugate pair (p ± sqrt(q)) / r, canonical form.

    q is a square-free integer > 1; r > 0; p, r in lowest terms as Fractions.
    """

    p: Fraction
    q: int
    r: Fraction

    def approx(self) -> tuple[float, float]:
        s = math.sqrt(self.q)
        return (float(self.p) + s) / float(self.r), (float(self.p) - s) / float(self.r)


RootValue = Union[Fraction, SurdRoot]

FINITE = "finite"
EMPTY = "empty"
ALL_REALS = "all_reals"


@dataclass(frozen=True, slots=True)
class SolutionSet:
    kind: str
    roots: tuple[RootValue, ...] = ()

    def __post_init__(self):
        if self.kind not in (FINITE, EMPTY, ALL_REALS):
            raise ValueError(f"bad solution-set kind {self.kind!r}")
        if self.kind != FINITE and self.roots:
            raise ValueError("only finite sets carry roots")

    @property
    def is_finite(self) -> bool:
        return self.kind == FINITE


def _root_sort_key(root: RootValue):
    if isinstance(root, Fraction):
        return (0, root, 0, Fraction(0))
    return (1, root.p, root.q, root.r)


def finite(roots) -> SolutionSet:
    """Deduplicated, canonically ordered finite set."""
    uniq = sorted(set(roots), key=_root_sort_key)
    return SolutionSet(FINITE, tuple(uniq))


def empty() -> SolutionSet:
    return SolutionSet(EMPTY)


def all_reals() -> SolutionSet:
    return SolutionSet(ALL_REALS)


def square_free_split(n: int) -> tuple[int, int]:
    """n > 0 → (s, q) with n == s*s*q and q square-free."""
    s, q, f = 1, 1, 2
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
            s *= f
        if n % f == 0:
            n //= f
            q *= f
        f += 1
    return s, q * n


def exact_sqrt(value: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None."""
    if value < 0:
        return None
    ns, ds = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if ns * ns == value.numerator and ds * ds == value.denominator:
        return Fraction(ns, ds)
    return None


def surd_pair(p: Fraction, d: Fraction, r: Fraction) -> SurdRoot:
    """Canonicalise (p ± sqrt(d))/r with d > 0 not a perfect square."""
    # sqrt(n/m) = sqrt(n*m)/m; pull the square part s out of the radicand.
    radicand = d.numerator * d.denominator
    s, q = square_free_split(radicand)
    k = Fraction(s, d.denominator)  # sqrt(d) == k*sqrt(q)
    p, r = p / k, r / k
    if r < 0:
        p, r = -p, -r
    return SurdRoot(p=p, q=q, r=r)


def quadratic_roots(a: Fraction, b: Fraction, c: Fraction) -> SolutionSet:
    """Exact real roots of a*x^2 + b*x + c = 0, a != 0."""
    disc = b * b - 4 * a * c
    if disc < 0:
        return empty()
    if disc == 0:
        return finite([-b / (2 * a)])
    s = exact_sqrt(disc)
    if s is not None:
        return finite([(-b + s) / (2 * a), (-b - s) / (2 * a)])
    return finite([surd_pair(-b, disc, 2 * a)])


def render_root(root: RootValue) -> list[str]:
    """Display strings for one RootValue (a surd pair expands to two)."""
    if isinstance(root, Fraction):
        return [str(root)]
    out = []
    for sign in ("+", "-"):
        if root.p == 0:
            num = f"sqrt({root.q})" if sign == "+" else f"-sqrt({root.q})"
        else:
            num = f"({root.p} {sign} sqrt({root.q}))"
        out.append(num if root.r == 1 else f"{num}/{root.r}")
    return out


def root_to_jsonable(root: RootValue):
    if isinstance(root, Fraction):
        return str(root)
    return {"p": str(root.p), "q": root.q, "r": str(root.r)}


def root_from_jsonable(raw) -> RootValue:
    if isinstance(raw, str):
        return Fraction(raw)
    if isinstance(raw, (int, float)):
        return Fraction(raw).limit_denominator() if isinstance(raw, float) else Fraction(raw)
    return SurdRoot(p=Fraction(str(raw["p"])), q=int(raw["q"]), r=Fraction(str(raw["r"])))


def set_to_jsonable(s: SolutionSet) -> dict:
    body: dict = {"kind": s.kind}
    if s.kind == FINITE:
        body["roots"] = [root_to_jsonable(r) for r in s.roots]
    return body


def set_from_jsonable(raw: dict) -> SolutionSet:
    kind = raw.get("kind")
    if kind == FINITE:
        return finite([root_from_jsonable(r) for r in raw.get("roots", [])])
    if kind == EMPTY:
        return empty()
    if kind == ALL_REALS:
        return all_reals()
    raise ValueError(f"bad solution-set kind {kind!r}")
