"""Normal-form housekeeping: folding, flattening, ordering, idempotence."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stepmark.expr import (
    Equation,
    Neg,
    Num,
    Power,
    Product,
    Sum,
    Var,
    normalize,
    normalize_line,
    num,
    parse_expr,
    parse_line,
    render_line,
)

from .samplers import random_expr, random_line


def norm(text: str):
    return normalize(parse_expr(text))


def test_constant_fold_and_ordering():
    # (1+2)+x folds the constants and places the variable term first.
    assert norm("(1+2)+x") == Sum((Var("x"), num(3)))
    assert norm("(1+2)+x") == norm("x + 3")


def test_flatten_and_fold_product():
    assert norm("2*(x*3)") == Product((num(6), Var("x")))
    assert norm("2*(x*3)") == norm("6*x")


def test_nested_sum_flattening():
    assert norm("(x + 1) + (x + 2)") == norm("x + x + 3")


def test_neg_is_eliminated():
    def has_neg(node) -> bool:
        if isinstance(node, Neg):
            return True
        if isinstance(node, (Sum, Product)):
            return any(has_neg(t) for t in (node.terms if isinstance(node, Sum) else node.factors))
        if isinstance(node, Power):
            return has_neg(node.base)
        return False

    for text in ["-x", "-(x+1)", "3 - x", "-(2*(x-4))", "--x"]:
        assert not has_neg(norm(text)), text


def test_no_like_term_merging():
    # Normalization is housekeeping, not simplification: x + x stays a Sum.
    result = norm("x + x")
    assert isinstance(result, Sum)
    assert len(result.terms) == 2


def test_no_product_expansion():
    result = norm("(x+1)*(x+2)")
    assert isinstance(result, Product)


def test_constant_last_in_sums_coefficient_first_in_products():
    s = norm("5 + x")
    assert isinstance(s, Sum)
    assert s.terms[-1] == num(5)
    p = norm("x * 4")
    assert isinstance(p, Product)
    assert p.factors[0] == num(4)


def test_zero_and_one_identities():
    assert norm("x + 0") == Var("x")
    assert norm("1 * x") == Var("x")
    assert norm("0 * x") == num(0)
    assert norm("x^1") == Var("x")
    assert norm("x^0") == num(1)


def test_idempotent_on_500_random_lines():
    rng = random.Random(9001)
    for _ in range(500):
        line = random_line(rng)
        once = normalize_line(line)
        assert normalize_line(once) == once


def test_round_trip_via_render():
    rng = random.Random(417)
    for _ in range(300):
        line = random_line(rng)
        text = render_line(line)
        assert normalize_line(parse_line(text)) == normalize_line(line), text


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**63), st.integers(min_value=0, max_value=3))
def test_idempotence_property(seed: int, depth: int):
    rng = random.Random(seed)
    expr = random_expr(rng, depth=depth)
    once = normalize(expr)
    assert normalize(once) == once


def test_equation_sides_normalized_independently():
    line = parse_line("(1+2)+x = 2*(x*3)")
    assert normalize_line(line) == Equation(norm("x+3"), norm("6x"))


@pytest.mark.parametrize(
    "a,b",
    [
        ("x + 3 + 0", "x + 3"),
        ("2*x*1", "2x"),
        ("x*2*3", "6x"),
    ],
)
def test_equivalent_spellings_share_normal_form(a: str, b: str):
    assert norm(a) == norm(b)
