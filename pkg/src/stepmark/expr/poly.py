"""Conversion to canonical single-variable polynomial form."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import DegreeLimitError
from .nodes import Expr, Neg, Num, Power, Product, Sum, Var

DEGREE_LIMIT = 16

_Coeffs = dict[int, Fraction]


@dataclass(frozen=True)
class CanonicalPoly:
    """Sparse exact-coefficient polynomial; empty coeffs == zero polynomial."""

    variable: str
    coeffs: dict[int, Fraction] = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Fraction:
        return self.coeffs.get(k, Fraction(0))

    def evaluate(self, x: Fraction) -> Fraction:
        return sum((c * x**k for k, c in self.coeffs.items()), Fraction(0))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CanonicalPoly)
            and self.variable == other.variable
            and self.coeffs == other.coeffs
        )

    def proportional_to(self, other: "CanonicalPoly") -> bool:
        """True when self == λ·other for some λ != 0."""
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        if set(self.coeffs) != set(other.coeffs):
            return False
        k = self.degree
        ratio = self.coeffs[k] / other.coeffs[k]
        return all(c == ratio * other.coeffs[k2] for k2, c in self.coeffs.items())


def _clean(c: _Coeffs) -> _Coeffs:
    return {k: v for k, v in c.items() if v != 0}


def _add(a: _Coeffs, b: _Coeffs) -> _Coeffs:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + v
    return _clean(out)


def _mul(a: _Coeffs, b: _Coeffs) -> _Coeffs:
    if not a or not b:
        return {}
    if max(a) + max(b) > DEGREE_LIMIT:
        raise DegreeLimitError(DEGREE_LIMIT)
    out: _Coeffs = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = ka + kb
            out[k] = out.get(k, Fraction(0)) + va * vb
    return _clean(out)


def _pow(a: _Coeffs, n: int) -> _Coeffs:
    out: _Coeffs = {0: Fraction(1)}
    for _ in range(n):
        out = _mul(out, a)
    return out


def _convert(e: Expr, variable: str) -> _Coeffs | None:
    match e:
        case Num(value):
            return {0: value} if value != 0 else {}
        case Var(name):
            return {1: Fraction(1)} if name == variable else None
        case Neg(child):
            inner = _convert(child, variable)
            return None if inner is None else {k: -v for k, v in inner.items()}
        case Sum(terms):
            out: _Coeffs = {}
            for t in terms:
                part = _convert(t, variable)
                if part is None:
                    return None
                out = _add(out, part)
            return out
        case Product(factors):
            out = {0: Fraction(1)}
            for f in factors:
                part = _convert(f, variable)
                if part is None:
                    return None
                out = _mul(out, part)
            return out
        case Power(base, exponent):
            inner = _convert(base, variable)
            if inner is None:
                return None
            if exponent >= 0:
                return _pow(inner, exponent)
            # negative powers stay polynomial only over nonzero constants
            if set(inner) <= {0}:
                const = inner.get(0, Fraction(0))
                if const == 0:
                    return None
                return {0: const**exponent}
            return None
    raise TypeError(f"not an Expr: {e!r}")


def to_polynomial(e: Expr, variable: str) -> CanonicalPoly | None:
    """Expand `e` into a polynomial in `variable`.

    Returns None when no polynomial form exists (division by the variable,
    foreign variables). Raises DegreeLimitError past degree 16.
    """
    coeffs = _convert(e, variable)
    if coeffs is None:
        return None
    return CanonicalPoly(variable, coeffs)
