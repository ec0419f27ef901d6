"""Operator semantics: applying correct and buggy transformation rules to lines.

Every operator either applies to a premise (returning a new, normalized line)
or reports non-applicability by returning None. An application never returns a
line that matches the premise.
"""
from __future__ import annotations

from fractions import Fraction

from ..expr import (
    ZERO,
    Equation,
    Expr,
    Expression,
    MathLine,
    Num,
    Power,
    Product,
    RootsLine,
    Sum,
    Var,
    finite,
    line_variables,
    lines_match,
    normalize,
    normalize_line,
    quadratic_roots,
    struct_key,
    to_polynomial,
)
from ..errors import DegreeLimitError
from .models import (
    CONSTANT_PARAM_OPERATORS,
    MAX_INFER_CANDIDATES,
    PARAMETRIC_OPERATORS,
    Operator,
    Production,
)

# hard ceiling on term count during expansion (applicability bound, not an error)
MAX_EXPANSION_TERMS = 128


# ---------------------------------------------------------------------------
# small structural helpers (inputs assumed normalized)

def additive_terms(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, Sum):
        return e.terms
    return (e,)


def build_sum(terms: list[Expr] | tuple[Expr, ...]) -> Expr:
    if not terms:
        return ZERO
    return normalize(Sum(tuple(terms)))


def split_coefficient(term: Expr) -> tuple[Fraction, Expr | None]:
    """Split a normalized term into (rational coefficient, symbolic core)."""
    if isinstance(term, Num):
        return term.value, None
    if isinstance(term, Product) and isinstance(term.factors[0], Num):
        rest = term.factors[1:]
        core = rest[0] if len(rest) == 1 else Product(rest)
        return term.factors[0].value, core
    return Fraction(1), term


def join_coefficient(coeff: Fraction, core: Expr | None) -> Expr:
    if core is None:
        return Num(coeff)
    return normalize(Product((Num(coeff), core)))


def collect_like(e: Expr) -> Expr:
    """Merge additive terms sharing the same symbolic core (5 + 3x + 2x -> 5x + 5)."""
    groups: dict[object, tuple[Fraction, Expr | None]] = {}
    order: list[object] = []
    for term in additive_terms(normalize(e)):
        coeff, core = split_coefficient(term)
        key = ("const",) if core is None else ("core", struct_key(core))
        if key in groups:
            prev_coeff, _ = groups[key]
            groups[key] = (prev_coeff + coeff, core)
        else:
            groups[key] = (coeff, core)
            order.append(key)
    rebuilt = [
        join_coefficient(coeff, core)
        for coeff, core in (groups[k] for k in order)
        if coeff != 0 or core is None
    ]
    return build_sum(rebuilt)


def scale(e: Expr, c: Fraction) -> Expr:
    """Multiply by a constant, distributing over a top-level sum."""
    factor = Num(c)
    terms = [normalize(Product((factor, t))) for t in additive_terms(normalize(e))]
    return build_sum(terms)


def _as_nonzero_constant(param: Expr) -> Fraction | None:
    p = normalize(param)
    if isinstance(p, Num) and p.value != 0:
        return p.value
    return None


class _ExpansionOverflow(Exception):
    pass


def _expand_expr(e: Expr) -> Expr:
    """Distribute all products over sums (and small powers of sums)."""

    def as_terms(x: Expr) -> list[Expr]:
        return list(additive_terms(x))

    def cross(a: list[Expr], b: list[Expr]) -> list[Expr]:
        if len(a) * len(b) > MAX_EXPANSION_TERMS:
            raise _ExpansionOverflow
        return [normalize(Product((t, u))) for t in a for u in b]

    def walk(x: Expr) -> Expr:
        match x:
            case Num() | Var():
                return x
            case Sum(terms):
                return build_sum([walk(t) for t in terms])
            case Product(factors):
                acc = [Num(Fraction(1))]
                for f in factors:
                    acc = cross(acc, as_terms(walk(f)))
                return build_sum(acc)
            case Power(base, exponent):
                inner = walk(base)
                if isinstance(inner, Sum) and 2 <= exponent <= 8:
                    acc = as_terms(inner)
                    for _ in range(exponent - 1):
                        acc = cross(acc, as_terms(inner))
                    return build_sum(acc)
                return normalize(Power(inner, exponent))
            case _:
                return normalize(x)

    return walk(normalize(e))


def _remove_one_term(e: Expr, t: Expr) -> Expr | None:
    """Remove one additive occurrence of t; None when t is not a term of e."""
    terms = list(additive_terms(e))
    for i, cand in enumerate(terms):
        if cand == t:
            del terms[i]
            return build_sum(terms)
    return None


# ---------------------------------------------------------------------------
# per-operator applications (equation in, line-or-None out)

def _apply_add(eq: Equation, t: Expr) -> MathLine:
    return Equation(
        collect_like(Sum((eq.lhs, t))),
        collect_like(Sum((eq.rhs, t))),
    )


def _apply_scale_both(eq: Equation, c: Fraction) -> MathLine:
    return Equation(collect_like(scale(eq.lhs, c)), collect_like(scale(eq.rhs, c)))


def negate(t: Expr) -> Expr:
    return normalize(Product((Num(Fraction(-1)), t)))


def _apply_move(eq: Equation, t: Expr, *, flip_sign: bool) -> MathLine | None:
    moved = negate(t) if flip_sign else t
    reduced = _remove_one_term(eq.lhs, t)
    if reduced is not None:
        return Equation(collect_like(reduced), collect_like(Sum((eq.rhs, moved))))
    reduced = _remove_one_term(eq.rhs, t)
    if reduced is not None:
        return Equation(collect_like(Sum((eq.lhs, moved))), collect_like(reduced))
    return None


def _apply_collect(eq: Equation) -> MathLine:
    return Equation(collect_like(eq.lhs), collect_like(eq.rhs))


def _apply_expand(eq: Equation) -> MathLine | None:
    try:
        return Equation(
            collect_like(_expand_expr(eq.lhs)), collect_like(_expand_expr(eq.rhs))
        )
    except _ExpansionOverflow:
        return None


def _quadratic_side(eq: Equation, unknown: str):
    """Return (a, b, c) for a premise of shape <quadratic> = 0, else None."""
    for quad, zero in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
        if normalize(zero) != ZERO:
            continue
        try:
            poly = to_polynomial(quad, unknown)
        except DegreeLimitError:
            return None
        if poly is not None and poly.degree == 2:
            return poly.coeff(2), poly.coeff(1), poly.coeff(0)
    return None


def _linear_factor(root: Fraction, unknown: str) -> tuple[Expr, Fraction]:
    """Integer-primitive factor (q*x - p) for root p/q; returns (factor, q)."""
    q = Fraction(root.denominator)
    factor = build_sum(
        [normalize(Product((Num(q), Var(unknown)))), Num(-root * q)]
    )
    return factor, q


def _apply_factor_quadratic(eq: Equation, unknown: str) -> MathLine | None:
    abc = _quadratic_side(eq, unknown)
    if abc is None:
        return None
    a, b, c = abc
    roots = quadratic_roots(a, b, c)
    if not roots.is_finite or not all(isinstance(r, Fraction) for r in roots.roots):
        return None
    if len(roots.roots) == 1:
        (r,) = roots.roots
        factor, q = _linear_factor(r, unknown)
        lead = a / (q * q)
        factored: Expr = Power(factor, 2)
    else:
        r1, r2 = roots.roots
        f1, q1 = _linear_factor(r1, unknown)
        f2, q2 = _linear_factor(r2, unknown)
        lead = a / (q1 * q2)
        factored = Product((f1, f2))
    if lead != 1:
        factored = Product((Num(lead), factored))
    return Equation(normalize(factored), ZERO)


def _linear_root(e: Expr, unknown: str) -> Fraction | None:
    poly = to_polynomial(e, unknown)
    if poly is not None and poly.degree == 1:
        return -poly.coeff(0) / poly.coeff(1)
    return None


def _apply_zero_product(eq: Equation, unknown: str) -> MathLine | None:
    for side, zero in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
        if normalize(zero) != ZERO:
            continue
        factors: tuple[Expr, ...]
        if isinstance(side, Product):
            factors = side.factors
        elif isinstance(side, Power) and side.exponent >= 2:
            factors = (side.base,)
        else:
            continue
        roots: list[Fraction] = []
        ok = True
        for f in factors:
            base = f.base if isinstance(f, Power) and f.exponent >= 1 else f
            if isinstance(base, Num):
                if base.value == 0:
                    ok = False  # degenerate 0-factor: whole line is 0 = 0
                continue
            try:
                root = _linear_root(base, unknown)
            except DegreeLimitError:
                root = None
            if root is None:
                ok = False
                break
            roots.append(root)
        if ok and roots:
            return normalize_line(RootsLine(unknown, finite(roots)))
    return None


def _apply_quadratic_formula(eq: Equation, unknown: str, *, sign_error: bool) -> MathLine | None:
    abc = _quadratic_side(eq, unknown)
    if abc is None:
        return None
    a, b, c = abc
    roots = quadratic_roots(a, -b if sign_error else b, c)
    if not roots.is_finite or not roots.roots:
        return None  # negative discriminant: out of real-root scope
    return normalize_line(RootsLine(unknown, roots))


def _apply_divide_one_side(eq: Equation, c: Fraction, unknown: str | None) -> MathLine:
    lhs_has = unknown is not None and unknown in line_variables(Expression(eq.lhs))
    rhs_has = unknown is not None and unknown in line_variables(Expression(eq.rhs))
    if rhs_has and not lhs_has:
        return Equation(eq.lhs, collect_like(scale(eq.rhs, Fraction(1) / c)))
    return Equation(collect_like(scale(eq.lhs, Fraction(1) / c)), eq.rhs)


def _apply_distribute_first_only(eq: Equation) -> MathLine | None:
    changed = False

    def walk(x: Expr) -> Expr:
        nonlocal changed
        match x:
            case Num() | Var():
                return x
            case Sum(terms):
                return build_sum([walk(t) for t in terms])
            case Power(base, exponent):
                return normalize(Power(walk(base), exponent))
            case Product(factors):
                done = [walk(f) for f in factors]
                for i, f in enumerate(done):
                    if isinstance(f, Sum):
                        others = done[:i] + done[i + 1 :]
                        multiplier = (
                            others[0] if len(others) == 1 else normalize(Product(tuple(others)))
                        )
                        first, rest = f.terms[0], f.terms[1:]
                        changed = True
                        return build_sum(
                            [normalize(Product((multiplier, first))), *rest]
                        )
                return normalize(Product(tuple(done)))
            case _:
                return normalize(x)

    lhs = walk(normalize(eq.lhs))
    rhs = walk(normalize(eq.rhs))
    if not changed:
        return None
    return Equation(collect_like(lhs), collect_like(rhs))


def _shared_terms(a: Sum, b: Sum) -> list[Expr]:
    b_keys = {struct_key(t) for t in b.terms}
    return [t for t in a.terms if struct_key(t) in b_keys]


def _apply_cancel_additive(eq: Equation) -> MathLine | None:
    """Cancel an additive term shared by a ratio's numerator and denominator."""
    done = False

    def walk(x: Expr) -> Expr:
        nonlocal done
        if done:
            return x
        match x:
            case Product(factors):
                num_idx = [i for i, f in enumerate(factors) if isinstance(f, Sum)]
                den_idx = [
                    i
                    for i, f in enumerate(factors)
                    if isinstance(f, Power) and f.exponent == -1 and isinstance(f.base, Sum)
                ]
                for ni in num_idx:
                    for di in den_idx:
                        shared = _shared_terms(factors[ni], factors[di].base)
                        num_terms = list(additive_terms(factors[ni]))
                        den_terms = list(additive_terms(factors[di].base))
                        if not shared or len(num_terms) < 2 or len(den_terms) < 2:
                            continue
                        t = shared[0]
                        num_terms.remove(t)
                        den_terms.remove(t)
                        done = True
                        new_factors = list(factors)
                        new_factors[ni] = build_sum(num_terms)
                        new_factors[di] = Power(build_sum(den_terms), -1)
                        return normalize(Product(tuple(new_factors)))
                return normalize(Product(tuple(walk(f) for f in factors)))
            case Sum(terms):
                return build_sum([walk(t) for t in terms])
            case Power(base, exponent):
                return normalize(Power(walk(base), exponent))
            case _:
                return x

    lhs = walk(normalize(eq.lhs))
    rhs = walk(normalize(eq.rhs))
    if not done:
        return None
    return Equation(lhs, rhs)


# ---------------------------------------------------------------------------
# public entry points

def apply_production(
    production: Production, params: tuple[Expr, ...], premise: MathLine
) -> MathLine | None:
    """Apply one rule to a premise; None signals the rule is not applicable."""
    premise = normalize_line(premise)
    if not isinstance(premise, Equation):
        return None
    params = tuple(normalize(p) for p in params)
    op = production.operator

    if op in PARAMETRIC_OPERATORS:
        if len(params) != 1:
            return None
        (param,) = params
        if op in CONSTANT_PARAM_OPERATORS:
            c = _as_nonzero_constant(param)
            if c is None:
                return None
    elif params:
        return None

    unknowns = line_variables(premise)
    unknown = next(iter(unknowns)) if len(unknowns) == 1 else None

    result: MathLine | None
    match op:
        case Operator.ADD_BOTH_SIDES:
            result = _apply_add(premise, param)
        case Operator.SUB_BOTH_SIDES:
            result = _apply_add(premise, negate(param))
        case Operator.MUL_BOTH_SIDES:
            result = _apply_scale_both(premise, c)
        case Operator.DIV_BOTH_SIDES:
            result = _apply_scale_both(premise, Fraction(1) / c)
        case Operator.MOVE_TERM_ACROSS:
            result = _apply_move(premise, param, flip_sign=True)
        case Operator.MOVE_TERM_NO_SIGN_FLIP:
            result = _apply_move(premise, param, flip_sign=False)
        case Operator.COLLECT_LIKE_TERMS:
            result = _apply_collect(premise)
        case Operator.EXPAND:
            result = _apply_expand(premise)
        case Operator.FACTOR_QUADRATIC:
            result = None if unknown is None else _apply_factor_quadratic(premise, unknown)
        case Operator.ZERO_PRODUCT_ROOTS:
            result = None if unknown is None else _apply_zero_product(premise, unknown)
        case Operator.QUADRATIC_FORMULA:
            result = (
                None
                if unknown is None
                else _apply_quadratic_formula(premise, unknown, sign_error=False)
            )
        case Operator.QUADRATIC_FORMULA_SIGN_ERROR:
            result = (
                None
                if unknown is None
                else _apply_quadratic_formula(premise, unknown, sign_error=True)
            )
        case Operator.SIMPLIFY_RATIO:
            result = None  # constants are kept reduced by normalization
        case Operator.REWRITE_EQUIVALENT:
            result = None  # credit marker only; never applied as a rewrite
        case Operator.DIVIDE_ONE_SIDE_ONLY:
            result = _apply_divide_one_side(premise, c, unknown)
        case Operator.DISTRIBUTE_FIRST_TERM_ONLY:
            result = _apply_distribute_first_only(premise)
        case Operator.CANCEL_ADDITIVE_TERM:
            result = _apply_cancel_additive(premise)
        case _:
            result = None

    if result is None:
        return None
    result = normalize_line(result)
    if lines_match(result, premise):
        return None
    return result


def infer_params(production: Production, premise: MathLine) -> list[tuple[Expr, ...]]:
    """Bounded candidate parameter lists searched from the premise's structure."""
    op = production.operator
    if op not in PARAMETRIC_OPERATORS:
        return []
    premise = normalize_line(premise)
    if not isinstance(premise, Equation):
        return []

    seen: set[object] = set()
    out: list[tuple[Expr, ...]] = []

    def push(e: Expr) -> None:
        key = struct_key(e)
        if key not in seen and len(out) < MAX_INFER_CANDIDATES:
            seen.add(key)
            out.append((e,))

    terms = list(additive_terms(premise.lhs)) + list(additive_terms(premise.rhs))
    if op in CONSTANT_PARAM_OPERATORS:
        for t in terms:
            coeff, core = split_coefficient(t)
            if coeff != 0 and (core is None or not isinstance(core, Num)):
                push(Num(coeff))
    else:
        for t in terms:
            push(t)
    return out
