from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import THEORY, polynomials
from perturbia.errors import DomainError, ParseError
from perturbia.field_algebra import Theory
from perturbia.parser import (conjugate, format_polynomial, parse_lagrangian, polynomial_from_json,
                              polynomial_to_json)


@settings(max_examples=300, deadline=None)
@given(polynomials)
def test_print_parse_round_trip(p):
    assert parse_lagrangian(format_polynomial(p), THEORY) == p


@settings(max_examples=100, deadline=None)
@given(polynomials)
def test_json_round_trip(p):
    assert polynomial_from_json(polynomial_to_json(p), p.n) == p


@settings(max_examples=100, deadline=None)
@given(polynomials)
def test_conjugation_is_an_involution(p):
    assert conjugate(THEORY, conjugate(THEORY, p)) == p


def test_string_lagrangian():
    th = Theory.build(2, real=["phi"])
    L = parse_lagrangian("d0(phi)^2 - d1(phi)^2", th)
    assert L == th.f("phi", 0) ** 2 - th.f("phi", 1) ** 2


def test_contraction_macro_uses_the_metric():
    th = Theory.build(4, real=["phi"])
    L = parse_lagrangian("dd(phi,phi) + m^2*phi^2", th)
    want = th.f("phi", 0) ** 2 - sum((th.f("phi", k) ** 2 for k in (1, 2, 3)), th.num(0))
    assert L == want + th.c("m", 2) * th.f("phi") ** 2


def test_nested_derivatives_and_rationals():
    th = Theory.build(2, real=["phi"])
    assert parse_lagrangian("d0(d1(phi)) * 3/4", th) == th.f("phi", 0, 1) * th.num(Fraction(3, 4))


@pytest.mark.parametrize("text, where", [("", "1:1"), ("phi +", "1:6"), ("dd(phi,phi", "1:11"), ("phi\n  + )", "2:5")])
def test_syntax_errors_carry_positions(text, where):
    th = Theory.build(2, real=["phi"])
    with pytest.raises(ParseError) as err:
        parse_lagrangian(text, th)
    assert str(err.value).startswith(where)


def test_semantic_errors():
    th = Theory.build(2, real=["phi"])
    with pytest.raises(DomainError, match="undeclared field"):
        parse_lagrangian("psi^2", th)
    with pytest.raises(DomainError):
        parse_lagrangian("d2(phi)", th)
