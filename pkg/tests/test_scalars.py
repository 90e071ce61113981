"""Field axioms, parsing, and printing of the cyclotomic scalars."""

from __future__ import annotations

import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multiarr.scalars import (
    Scalar,
    ScalarParseError,
    cyclotomic_polynomial,
    one,
    parse_scalar,
    rational,
    zero,
    zeta,
)

ORDERS = (1, 3, 4)


def scalars(order: int, *, nonzero: bool = False, bound: int = 9) -> st.SearchStrategy[Scalar]:
    degree = len(cyclotomic_polynomial(order)) - 1
    coeff = st.fractions(min_value=-bound, max_value=bound, max_denominator=7)
    base = st.tuples(*([coeff] * degree)).map(lambda t: Scalar(order, t))
    return base.filter(bool) if nonzero else base


def order_and_scalars(n: int, *, nonzero: bool = False) -> st.SearchStrategy:
    return st.sampled_from(ORDERS).flatmap(
        lambda r: st.tuples(st.just(r), *[scalars(r, nonzero=nonzero) for _ in range(n)])
    )


def test_cyclotomic_polynomials() -> None:
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(3) == (1, 1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)
    with pytest.raises(ValueError):
        cyclotomic_polynomial(0)


def test_zeta_relations() -> None:
    z3 = zeta(3)
    assert z3**3 == one(3)
    assert z3 * z3 == parse_scalar("-1 - z", 3)
    assert one(3) + z3 + z3 * z3 == zero(3)
    z4 = zeta(4)
    assert z4 * z4 == -one(4)
    assert z4**4 == one(4)
    assert zeta(3, 2) == zeta(3) ** 2
    assert zeta(1) == one(1)


@pytest.mark.parametrize(
    ("text", "order", "expected"),
    [
        ("0", 3, zero(3)),
        ("-3/2", 1, rational(Fraction(-3, 2))),
        ("2*z^2", 4, rational(-2, 4)),
        ("(1 + z) * (1 - z)", 4, rational(2, 4)),
        ("(1 - z)*(1 - z^2)", 3, rational(3, 3)),
        ("z^3", 3, one(3)),
        ("  -  z  +  1 ", 3, one(3) - zeta(3)),
        ("--1", 1, one(1)),
        ("1/2 + 1/3", 1, rational(Fraction(5, 6))),
    ],
)
def test_parse_examples(text: str, order: int, expected: Scalar) -> None:
    assert parse_scalar(text, order) == expected


@pytest.mark.parametrize(
    "text",
    ["", "1/0", "z^", "1 +", "(1", "1)", "q", "1..2", "z 2", "* 2"],
)
def test_parse_rejects(text: str) -> None:
    with pytest.raises(ScalarParseError):
        parse_scalar(text, 3)


def test_parse_error_carries_position() -> None:
    with pytest.raises(ScalarParseError) as exc:
        parse_scalar("1 + @", 3)
    assert exc.value.pos == 4
    assert exc.value.text == "1 + @"


@given(order_and_scalars(1))
def test_print_parse_round_trip(data) -> None:
    order, x = data
    assert parse_scalar(str(x), order) == x


@given(order_and_scalars(3))
def test_ring_axioms(data) -> None:
    _, a, b, c = data
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == zero(a.order)


@given(order_and_scalars(1, nonzero=True))
def test_inverse_law(data) -> None:
    order, a = data
    assert a * a.inverse() == one(order)
    assert a / a == one(order)
    assert a ** (-1) == a.inverse()
    assert 1 / a == a.inverse()


@given(order_and_scalars(1))
def test_power_and_int_mixing(data) -> None:
    order, a = data
    assert a**0 == one(order)
    assert a**3 == a * a * a
    assert 2 * a == a + a
    assert a - 1 == a - one(order)
    assert 1 - a == -(a - 1)


@settings(max_examples=60)
@given(order_and_scalars(2, nonzero=True))
def test_complex_embedding_is_a_homomorphism(data) -> None:
    _, a, b = data
    assert abs((a * b).to_complex() - a.to_complex() * b.to_complex()) <= 1e-9
    assert abs((a + b).to_complex() - (a.to_complex() + b.to_complex())) <= 1e-9


@pytest.mark.parametrize("order", ORDERS)
def test_zeta_embeds_to_the_unit_root(order: int) -> None:
    assert abs(zeta(order).to_complex() - cmath.exp(2j * cmath.pi / order)) <= 1e-12


def test_mixed_orders_rejected() -> None:
    with pytest.raises(ValueError, match="mixed scalar orders"):
        zeta(3) + zeta(4)
    with pytest.raises(ValueError, match="mixed scalar orders"):
        zeta(3) * one(1)


def test_rational_view() -> None:
    assert rational(7, 3).as_rational() == 7
    assert rational(7, 3).is_rational()
    assert not zeta(3).is_rational()
    with pytest.raises(ValueError, match="not rational"):
        zeta(3).as_rational()


def test_zero_division() -> None:
    with pytest.raises(ZeroDivisionError):
        zero(3).inverse()
    with pytest.raises(ZeroDivisionError):
        one(3) / zero(3)
    with pytest.raises(ZeroDivisionError):
        one(3) / 0


def test_str_forms() -> None:
    assert str(zero(3)) == "0"
    assert str(zeta(3) * zeta(3)) == "-z - 1"
    assert str(rational(Fraction(5, 2))) == "5/2"
    assert str(2 * parse_scalar("z^2", 3)) == "-2*z - 2"
    assert str(-zeta(4)) == "-z"


@given(order_and_scalars(2))
def test_sort_key_is_a_total_order(data) -> None:
    _, a, b = data
    assert (a.sort_key() == b.sort_key()) == (a == b)
    assert a.sort_key() < b.sort_key() or b.sort_key() <= a.sort_key()
