"""Tests for polynomials, rational functions, parametrized polynomials and maps."""
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from algebraic_real import AlgebraicReal, as_real
from errors import DimensionError, DomainError, GuardViolation
from monomial_order import OrderIndex
from polynomials import Condition, ParamPoly, Poly, PolyMap, RatFunc, Relation, guard_conditions, make_point

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def x(i, n):
    return Poly.variable(i, n)


def test_arithmetic_and_evaluation():
    p = (x(0, 2) + 1) * (x(1, 2) - 2)
    assert p.evaluate(make_point([3, 5])) == 12
    assert p.total_degree() == 2
    assert (p - p).is_zero()
    assert (x(0, 1) ** 3).evaluate([AlgebraicReal.from_root([-2, 0, 1], 1, 2)]) == 2 * AlgebraicReal.from_root([-2, 0, 1], 1, 2)


def test_exponent_arity_checked():
    with pytest.raises(DimensionError):
        Poly(2, {(1,): 1})
    with pytest.raises(DimensionError):
        x(0, 2).evaluate([1])


def test_remap_insert_and_drop():
    p = x(0, 2) * x(1, 2)
    moved = p.insert_vars(1)
    assert moved.nvars == 3
    assert moved == x(0, 3) * x(2, 3)
    assert (x(0, 3) + x(2, 3)).drop_var(1) == x(0, 2) + x(1, 2)
    with pytest.raises(DimensionError):
        moved.drop_var(2)


def test_substitute():
    p = x(0, 2) ** 2 + x(1, 2)
    assert p.substitute(0, x(1, 2) + 1) == x(1, 2) ** 2 + 3 * x(1, 2) + 1


def test_ratfunc_cancels():
    num = x(0, 1) ** 2 - 1
    den = x(0, 1) - 1
    f = RatFunc(num, den)
    assert f.is_polynomial()
    assert f == RatFunc(x(0, 1) + 1)
    with pytest.raises(DomainError):
        RatFunc(num, Poly.zero(1))


def test_ratfunc_guard_violation():
    f = RatFunc(Poly.constant(1, 1), x(0, 1))
    assert f.evaluate([2]) == Fraction(1, 2)
    with pytest.raises(GuardViolation):
        f.evaluate([0])
    conditions = guard_conditions(RatFunc(x(0, 1) + 1, x(0, 1)))
    assert len(conditions) == 2
    assert all(c.relation == Relation.NE for c in conditions)


def test_param_poly_from_poly_groups_by_index():
    # z - x*y, n=1, k=1
    p = ParamPoly.from_poly(Poly(3, {(0, 0, 1): 1, (1, 1, 0): -1}), 1, 1)
    assert p.support() == (OrderIndex((0,), 1), OrderIndex((1,), 0))
    assert p.coeff(OrderIndex((1,), 0)) == RatFunc(-x(0, 1))
    assert [c for c in p.z_coefficients([2], [3])] == [as_real(-6), as_real(1)]
    assert not p.vanishes_at([0], [3])


def test_divide_by_returns_guard():
    p = ParamPoly.from_poly(Poly(3, {(0, 0, 1): 1, (1, 1, 0): -1}), 1, 1)
    quotient, guard = p.divide_by(OrderIndex((1,), 0))
    assert quotient.coeff(OrderIndex((1,), 0)) == RatFunc.constant(1, 1)
    assert guard == RatFunc(-x(0, 1))
    with pytest.raises(DomainError):
        p.divide_by(OrderIndex((0,), 0))


def test_truncate_and_substitute_param():
    p = ParamPoly.from_poly(Poly(3, {(0, 0, 1): 1, (1, 1, 0): -1}), 1, 1)
    assert p.truncate(OrderIndex((0,), 1)).support() == (OrderIndex((0,), 1),)
    # y := 2 turns z - x*y into z - 2x over k = 0
    two = ParamPoly.constant(2, 1, 1)
    reduced = p.substitute_param(0, two)
    assert reduced.k == 0
    assert reduced.coeff(OrderIndex((), 0)) == RatFunc(-2 * x(0, 1))


def test_insert_and_drop_params():
    p = ParamPoly.from_poly(Poly(3, {(0, 0, 1): 1, (1, 1, 0): -1}), 1, 1)
    wider = p.insert_params(0)
    assert wider.k == 2
    assert wider.drop_param(0) == p
    with pytest.raises(DimensionError):
        wider.drop_param(1)


def test_specialize():
    p = ParamPoly.from_poly(Poly(3, {(0, 0, 1): 1, (1, 1, 0): -1}), 1, 1)
    assert p.specialize([3]) == Poly(2, {(0, 1): 1, (1, 0): -3})


def test_condition_and_polymap():
    c = Condition(x(0, 2) - x(1, 2), '>')
    assert c.holds([2, 1])
    assert not c.holds([1, 1])
    f = PolyMap(2, [RatFunc(x(0, 2) + x(1, 2))])
    assert f.apply([1, 2]) == (as_real(3),)
    g = PolyMap.graph(f)
    assert g.n_out == 3
    assert PolyMap.projection([1], 2).apply([5, 7]) == (as_real(7),)


@given(small, small, small)
def test_evaluation_is_a_ring_homomorphism(a, b, c):
    p = x(0, 2) ** 2 - 3 * x(1, 2) + c
    q = x(0, 2) * x(1, 2) + 1
    point = [a, b]
    assert (p * q).evaluate(point) == p.evaluate(point) * q.evaluate(point)
    assert (p + q).evaluate(point) == p.evaluate(point) + q.evaluate(point)
