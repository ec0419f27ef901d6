"""Expression trees and lines of working.

An Expr is one of: Num (exact rational), Var, Sum, Product, Power (integer
exponent), Neg. Subtraction parses to Sum(a, Neg(b)); division to
Product(a, Power(b, -1)). A MathLine is a bare Expression, an Equation, or a
RootsLine ("x = 2 or x = 3", the output shape of root-producing rules).

`normalize` flattens nested sums/products, folds constant subterms and orders
siblings deterministically. It is idempotent and deliberately *not* a
simplifier: it never expands products over sums and never merges like terms
with different coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from . import sets
from .sets import SolutionSet

MAX_EXPONENT = 64  # guard against pathological constant powers


@dataclass(frozen=True, slots=True)
class Num:
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Sum:
    terms: tuple["Expr", ...]


@dataclass(frozen=True, slots=True)
class Product:
    factors: tuple["Expr", ...]


@dataclass(frozen=True, slots=True)
class Power:
    base: "Expr"
    exponent: int


@dataclass(frozen=True, slots=True)
class Neg:
    child: "Expr"


Expr = Union[Num, Var, Sum, Product, Power, Neg]

ZERO = Num(Fraction(0))
ONE = Num(Fraction(1))


@dataclass(frozen=True, slots=True)
class Expression:
    expr: Expr
    source_text: str = field(default="", compare=False)


@dataclass(frozen=True, slots=True)
class Equation:
    lhs: Expr
    rhs: Expr
    source_text: str = field(default="", compare=False)


@dataclass(frozen=True, slots=True)
class RootsLine:
    """Disjunction of root equations for one unknown, e.g. x = 2 or x = 3."""

    unknown: str
    roots: SolutionSet
    source_text: str = field(default="", compare=False)


MathLine = Union[Expression, Equation, RootsLine]


def num(value) -> Num:
    return Num(Fraction(value))


# ---------------------------------------------------------------------------
# structure helpers

def variables(e: Expr) -> set[str]:
    match e:
        case Num():
            return set()
        case Var(name):
            return {name}
        case Sum(terms):
            return set().union(*(variables(t) for t in terms))
        case Product(factors):
            return set().union(*(variables(f) for f in factors))
        case Power(base, _):
            return variables(base)
        case Neg(child):
            return variables(child)
    raise TypeError(f"not an Expr: {e!r}")


def line_variables(line: MathLine) -> set[str]:
    match line:
        case Expression(expr):
            return variables(expr)
        case Equation(lhs, rhs):
            return variables(lhs) | variables(rhs)
        case RootsLine(unknown, _):
            return {unknown}
    raise TypeError(f"not a MathLine: {line!r}")


def syntactic_degree(e: Expr) -> int:
    """Degree of a term as written (used only for canonical ordering)."""
    match e:
        case Num():
            return 0
        case Var():
            return 1
        case Sum(terms):
            return max(syntactic_degree(t) for t in terms)
        case Product(factors):
            return sum(syntactic_degree(f) for f in factors)
        case Power(base, exponent):
            return syntactic_degree(base) * exponent
        case Neg(child):
            return syntactic_degree(child)
    raise TypeError(f"not an Expr: {e!r}")


def struct_key(e: Expr):
    """Total order on expressions; kind rank first so payloads never cross-compare."""
    match e:
        case Num(value):
            return (0, value)
        case Var(name):
            return (1, name)
        case Power(base, exponent):
            return (2, struct_key(base), exponent)
        case Product(factors):
            return (3, tuple(struct_key(f) for f in factors))
        case Sum(terms):
            return (4, tuple(struct_key(t) for t in terms))
        case Neg(child):
            return (5, struct_key(child))
    raise TypeError(f"not an Expr: {e!r}")


def _sum_order_key(t: Expr):
    return (-syntactic_degree(t), struct_key(t))


def _product_order_key(f: Expr):
    return (0 if isinstance(f, Num) else 1, struct_key(f))


# ---------------------------------------------------------------------------
# normalization

def normalize(e: Expr) -> Expr:
    match e:
        case Num() | Var():
            return e
        case Neg(child):
            return normalize(Product((Num(Fraction(-1)), child)))
        case Power(base, exponent):
            return _normalize_power(normalize(base), exponent)
        case Sum(terms):
            return _normalize_sum([normalize(t) for t in terms])
        case Product(factors):
            return _normalize_product([normalize(f) for f in factors])
    raise TypeError(f"not an Expr: {e!r}")


def _normalize_power(base: Expr, exponent: int) -> Expr:
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Num):
        if base.value != 0 or exponent > 0:
            return Num(base.value**exponent)
        return Power(base, exponent)  # 0^negative: left as a pole
    if isinstance(base, Power):
        merged = base.exponent * exponent
        if abs(merged) <= MAX_EXPONENT:
            return _normalize_power(base.base, merged)
    return Power(base, exponent)


def _normalize_sum(terms: list[Expr]) -> Expr:
    flat: list[Expr] = []
    constant = Fraction(0)
    for t in terms:
        if isinstance(t, Sum):
            flat.extend(t.terms)  # children already normalized
        else:
            flat.append(t)
    rest = []
    for t in flat:
        if isinstance(t, Num):
            constant += t.value
        else:
            rest.append(t)
    rest.sort(key=_sum_order_key)
    if constant != 0 or not rest:
        rest.append(Num(constant))
    if len(rest) == 1:
        return rest[0]
    return Sum(tuple(rest))


def _group_powers(factors: list[Expr]) -> list[Expr]:
    """Merge repeated bases: x*x -> x^2, x^2*x^3 -> x^5. Positive and negative
    exponents are kept apart so a pole is never silently cancelled (x * x^-1
    stays a product rather than becoming 1)."""
    order: list[tuple] = []
    groups: dict[tuple, tuple[Expr, int, list[Expr]]] = {}
    for f in factors:
        base, exp = (f.base, f.exponent) if isinstance(f, Power) else (f, 1)
        key = (struct_key(base), exp > 0)
        if key in groups:
            prev_base, prev_exp, originals = groups[key]
            groups[key] = (prev_base, prev_exp + exp, originals + [f])
        else:
            groups[key] = (base, exp, [f])
            order.append(key)
    out: list[Expr] = []
    for key in order:
        base, exp, originals = groups[key]
        if abs(exp) <= MAX_EXPONENT:
            out.append(_normalize_power(base, exp))
        else:
            out.extend(originals)
    return out


def _normalize_product(factors: list[Expr]) -> Expr:
    flat: list[Expr] = []
    coeff = Fraction(1)
    for f in factors:
        if isinstance(f, Product):
            flat.extend(f.factors)
        else:
            flat.append(f)
    rest = []
    for f in flat:
        if isinstance(f, Num):
            coeff *= f.value
        else:
            rest.append(f)
    if coeff == 0:
        return ZERO
    rest = _group_powers(rest)
    rest.sort(key=_product_order_key)
    if coeff != 1 or not rest:
        rest.insert(0, Num(coeff))
    if len(rest) == 1:
        return rest[0]
    return Product(tuple(rest))


def normalize_line(line: MathLine) -> MathLine:
    match line:
        case Expression(expr, source_text=src):
            return Expression(normalize(expr), source_text=src)
        case Equation(lhs, rhs, source_text=src):
            return Equation(normalize(lhs), normalize(rhs), source_text=src)
        case RootsLine(unknown, roots, source_text=src):
            if roots.is_finite and len(roots.roots) == 1 and isinstance(roots.roots[0], Fraction):
                return Equation(Var(unknown), Num(roots.roots[0]), source_text=src)
            return RootsLine(unknown, roots, source_text=src)
    raise TypeError(f"not a MathLine: {line!r}")


def lines_match(a: MathLine, b: MathLine) -> bool:
    """Structural equality after normalization; equations match either way round."""
    a, b = normalize_line(a), normalize_line(b)
    match (a, b):
        case (Expression(x), Expression(y)):
            return x == y
        case (Equation(l1, r1), Equation(l2, r2)):
            return (l1 == l2 and r1 == r2) or (l1 == r2 and r1 == l2)
        case (RootsLine(u1, s1), RootsLine(u2, s2)):
            return u1 == u2 and s1 == s2
    return False


# ---------------------------------------------------------------------------
# evaluation

def evaluate(e: Expr, env: dict[str, Fraction]) -> Fraction:
    """Exact evaluation. Raises ZeroDivisionError at poles, KeyError for free vars."""
    match e:
        case Num(value):
            return value
        case Var(name):
            return env[name]
        case Sum(terms):
            return sum((evaluate(t, env) for t in terms), Fraction(0))
        case Product(factors):
            out = Fraction(1)
            for f in factors:
                out *= evaluate(f, env)
            return out
        case Power(base, exponent):
            return evaluate(base, env) ** exponent
        case Neg(child):
            return -evaluate(child, env)
    raise TypeError(f"not an Expr: {e!r}")


# ---------------------------------------------------------------------------
# rendering (deterministic; parse(render(L)) normalizes back to L)

_ATOM, _POW, _UNARY, _MUL, _ADD = 50, 40, 30, 20, 10


def _precedence(e: Expr) -> int:
    match e:
        case Num(value):
            return _ATOM if value >= 0 and value.denominator == 1 else _UNARY
        case Var():
            return _ATOM
        case Power():
            return _POW
        case Product():
            return _MUL
        case Sum():
            return _ADD
        case Neg():
            return _UNARY
    raise TypeError(f"not an Expr: {e!r}")


def _wrap(e: Expr, parent_prec: int) -> str:
    text = render(e)
    return f"({text})" if _precedence(e) < parent_prec else text


def _is_negative_term(e: Expr) -> bool:
    match e:
        case Num(value):
            return value < 0
        case Product(factors) if isinstance(factors[0], Num):
            return factors[0].value < 0
        case Neg():
            return True
    return False


def _negate_term(e: Expr) -> Expr:
    match e:
        case Num(value):
            return Num(-value)
        case Product(factors) if isinstance(factors[0], Num):
            head = Num(-factors[0].value)
            rest = factors[1:]
            if head.value == 1 and rest:
                return rest[0] if len(rest) == 1 else Product(rest)
            return Product((head,) + rest)
        case Neg(child):
            return child
    return Neg(e)


def render(e: Expr) -> str:
    match e:
        case Num(value):
            return str(value)
        case Var(name):
            return name
        case Neg(child):
            return f"-{_wrap(child, _UNARY + 1)}"
        case Power(base, exponent):
            base_text = _wrap(base, _POW + 1)
            return f"{base_text}^{exponent}" if exponent >= 0 else f"{base_text}^({exponent})"
        case Sum(terms):
            parts = []
            for i, t in enumerate(terms):
                if i and _is_negative_term(t):
                    parts.append(f" - {_wrap(_negate_term(t), _ADD + 1)}")
                elif i:
                    parts.append(f" + {_wrap(t, _ADD + 1)}")
                else:
                    parts.append(_wrap(t, _ADD))
            return "".join(parts)
        case Product(factors):
            return _render_product(factors)
    raise TypeError(f"not an Expr: {e!r}")


def _render_product(factors: tuple[Expr, ...]) -> str:
    coeff = Fraction(1)
    top: list[str] = []
    bottom: list[str] = []
    for f in factors:
        match f:
            case Num(value):
                coeff *= value
            case Power(base, exponent) if exponent < 0:
                inv = base if exponent == -1 else Power(base, -exponent)
                bottom.append(_wrap(inv, _MUL + 1))
            case _:
                top.append(_wrap(f, _MUL + 1))
    sign = "-" if coeff < 0 else ""
    coeff = abs(coeff)
    if coeff.numerator != 1 or not top:
        top.insert(0, str(coeff.numerator))
    if coeff.denominator != 1:
        bottom.insert(0, str(coeff.denominator))
    num_text = "*".join(top)
    if not bottom:
        return sign + num_text
    den_text = "*".join(bottom)
    if len(bottom) > 1:
        den_text = f"({den_text})"
    return f"{sign}{num_text}/{den_text}"


def render_line(line: MathLine) -> str:
    match line:
        case Expression(expr):
            return render(expr)
        case Equation(lhs, rhs):
            return f"{render(lhs)} = {render(rhs)}"
        case RootsLine(unknown, roots):
            if not roots.is_finite or not roots.roots:
                raise ValueError("only nonempty finite root lines are renderable")
            clauses = []
            for root in roots.roots:
                clauses.extend(f"{unknown} = {text}" for text in sets.render_root(root))
            return " or ".join(clauses)
    raise TypeError(f"not a MathLine: {line!r}")
