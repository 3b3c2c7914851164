"""Tests for exact real algebraic numbers and root isolation."""
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from algebraic_real import AlgebraicReal, as_real, format_rational, parse_rational, root_isolate, sturm_count
from errors import DomainError

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def sqrt2():
    return AlgebraicReal.from_root([-2, 0, 1], 1, 2)


def test_parse_rational():
    assert parse_rational("-3/4") == Fraction(-3, 4)
    assert parse_rational("5") == 5
    assert format_rational(Fraction(6, 4)) == "3/2"


@pytest.mark.parametrize("text", ["1/0", "0.5", "1e3", "", "abc", "1/ 2"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_from_root_needs_an_isolating_interval():
    with pytest.raises(DomainError):
        AlgebraicReal.from_root([-2, 0, 1], -2, 2)
    with pytest.raises(DomainError):
        AlgebraicReal.from_root([-2, 0, 1], 2, 3)


def test_rational_root_collapses():
    r = AlgebraicReal.from_root([-4, 0, 1], 1, 3)
    assert r.is_rational
    assert r == 2


def test_sqrt2_arithmetic_is_exact():
    s = sqrt2()
    assert not s.is_rational
    assert s * s == 2
    assert (s + s) * (s + s) == 8
    assert s - s == 0
    assert (s + 1) * (s - 1) == 1
    assert 1 < s < Fraction(3, 2)
    assert -s < 0


def test_inverse_of_irrational():
    s = sqrt2()
    assert s.inverse() * s == 1
    with pytest.raises(DomainError):
        as_real(0).inverse()


def test_root_isolate_rational_and_irrational():
    roots = root_isolate([-2, 0, 1])
    assert len(roots) == 2
    assert roots[0] < 0 < roots[1]
    assert roots[1] == sqrt2()
    assert root_isolate([Fraction(-1), Fraction(0), Fraction(1)]) == [as_real(-1), as_real(1)]
    assert root_isolate([1, 0, 1]) == []
    assert root_isolate([5]) == []


def test_root_isolate_with_algebraic_coefficients():
    s = sqrt2()
    # z - sqrt2 has the single root sqrt2
    roots = root_isolate([-s, 1])
    assert roots == [s]
    # z^2 - 2*sqrt2*z + 2 = (z - sqrt2)^2
    assert root_isolate([2, -2 * s, 1]) == [s]


def test_root_isolate_zero_polynomial():
    with pytest.raises(DomainError):
        root_isolate([0, 0])


def test_sturm_count():
    assert sturm_count([-2, 0, 1]) == 2
    assert sturm_count([-2, 0, 1], Fraction(0), None) == 1
    assert sturm_count([1, 0, 1]) == 0


@given(rationals, rationals)
def test_rational_fast_path_matches_fraction(p, q):
    assert as_real(p) + as_real(q) == p + q
    assert as_real(p) * as_real(q) == p * q
    assert (as_real(p) < as_real(q)) == (p < q)


@given(rationals)
def test_linear_root_is_found(q):
    assert root_isolate([-q, 1]) == [as_real(q)]


quadratic_radicands = st.sampled_from([2, 3, 5, 6, 7, 10])


def sqrt_of(n):
    return AlgebraicReal.from_root([-n, 0, 1], 0, n)


@given(rationals, rationals)
def test_subtraction_undoes_addition_on_rationals(p, q):
    a, b = as_real(p), as_real(q)
    assert (a + b) - b == a


@given(quadratic_radicands, rationals)
def test_subtraction_undoes_addition_with_a_surd(n, q):
    a = sqrt_of(n)
    assert (a + q) - q == a
    assert (as_real(q) + a) - a == q


@given(quadratic_radicands, quadratic_radicands)
def test_subtraction_undoes_addition_of_two_surds(n, m):
    a, b = sqrt_of(n), sqrt_of(m)
    assert (a + b) - b == a


def test_refinement_keeps_value_and_hash():
    s = sqrt2()
    before = (s.interval, hash(s), s.min_poly)
    lo, hi = s.refine(Fraction(1, 10 ** 6))
    assert hi - lo <= Fraction(1, 10 ** 6)
    assert (s.interval, hash(s), s.min_poly) == before
    assert s == sqrt2()
    assert hash(s) == hash(sqrt2())
    assert s * s == 2
