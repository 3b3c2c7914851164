"""Tests for family transforms: restriction, l-reduction, products, dedupe and extensions."""
import pytest

from descriptors import DefSetDescriptor
from errors import ContractViolation, DimensionError, NormalFormError
from instance_generator import collision_fixture, single_equation_family
from polynomials import ParamPoly, Poly, PolyMap, RatFunc, make_point
from small_sets import SmallSetModel
from ufss_calculus import (
    append_param, dedupe_k0, insert_free_param, push_graph, recombine_products, reduce_l_to_1, relax_conditions,
    restrict_sub, split_by_selection, substitute_param,
)
from ufss_core import UFSS, DecompositionResult
from x_descriptors import ExplicitX


def pts(*values):
    return tuple(make_point(v) for v in values)


def shift_family(points):
    # z - x - y: injective in x for every y
    return single_equation_family(1, 1, Poly(3, {(0, 0, 1): 1, (1, 0, 0): -1, (0, 1, 0): -1}), points)


def two_coordinate_family(points):
    # c1 = x, c2 = 2x over k = 0
    first = ParamPoly.from_poly(Poly(2, {(0, 1): 1, (1, 0): -1}), 1, 0)
    second = ParamPoly.from_poly(Poly(2, {(0, 1): 1, (1, 0): -2}), 1, 0)
    Z = DefSetDescriptor(m=1, k=0, l=2, equations=(first, second), nondegenerate=True)
    S = SmallSetModel.base(1, points)
    return UFSS(Z, S, ExplicitX(S, 0))


def test_dedupe_keeps_least_preimage():
    # c = g^2 on S = {-1, 1}
    u = single_equation_family(1, 0, Poly(2, {(0, 1): 1, (2, 0): -1}), [(-1,), (1,)])
    result = dedupe_k0(u)
    assert len(result) == 1
    assert result.pieces[0].S.points == pts([-1])
    assert result.provenance == (('L37-DEDUP',),)
    assert result.union_at([]) == u.union_at([])
    with pytest.raises(DimensionError):
        dedupe_k0(collision_fixture())


def test_dedupe_splits_multi_valued_fibers_by_selector():
    u = single_equation_family(1, 0, Poly(2, {(0, 2): 1, (1, 0): -1}), [(1,), (4,)])
    result = dedupe_k0(u)
    assert len(result) == 2
    assert result.union_at([]) == pts([-2], [-1], [1], [2])


def test_split_by_selection():
    single = collision_fixture()
    assert split_by_selection(single) == (single,)
    u = single_equation_family(1, 0, Poly(2, {(0, 2): 1, (1, 0): -1}), [(4,)])
    parts = split_by_selection(u)
    assert [p.Z.fiber([4], []) for p in parts] == [pts([-2]), pts([2])]


def test_restrict_sub_recovers_inner_union():
    outer = DecompositionResult.single(shift_family([(1,), (2,), (3,)]).mark_injective(), 'LEXMIN')
    inner = shift_family([(2,)])
    result = restrict_sub(inner, outer, samples=[(0,), (1,)])
    assert all(tags[0] == 'L35-RESTRICT' for tags in result.provenance)
    for a in ([0], [1], [5]):
        assert result.union_at(a) == inner.union_at(a)


def test_restrict_sub_detects_escape():
    outer = DecompositionResult.single(shift_family([(1,)]).mark_injective(), 'LEXMIN')
    with pytest.raises(ContractViolation):
        restrict_sub(shift_family([(5,)]), outer, samples=[(0,)])


def test_restrict_sub_needs_injective_outer():
    outer = DecompositionResult.single(collision_fixture(), 'LEXMIN')
    with pytest.raises(ContractViolation):
        restrict_sub(collision_fixture(), outer)


def test_reduce_and_recombine():
    u = two_coordinate_family([(1,), (2,)])
    coordinates = reduce_l_to_1(u)
    assert [c.l for c in coordinates] == [1, 1]
    assert coordinates[1].union_at([]) == pts([2], [4])
    per_coordinate = [dedupe_k0(c) for c in coordinates]
    result = recombine_products(u, per_coordinate, samples=[()])
    assert result.union_at([]) == u.union_at([]) == pts([1, 2], [2, 4])
    with pytest.raises(NormalFormError):
        reduce_l_to_1(collision_fixture())


def test_relax_conditions_drops_strict_parts():
    p = ParamPoly.from_poly(Poly(2, {(0, 2): 1, (1, 0): -1}), 1, 0)
    Z = DefSetDescriptor(m=1, k=0, l=1, equations=(p,), strict=(Poly.variable(1, 2),))
    S = SmallSetModel.base(1, [(9,)])
    u = UFSS(Z, S, ExplicitX(S, 0))
    assert u.union_at([]) == pts([3])
    assert relax_conditions(u).union_at([]) == pts([-3], [3])


def test_push_graph_keeps_fibers():
    u = collision_fixture()
    square = PolyMap(1, [RatFunc(Poly.variable(0, 1) ** 2)])
    pushed = push_graph(u, square)
    assert pushed.m == 2
    assert pushed.S.points == pts([1, 1], [2, 4])
    for a in ([0], [1], [3]):
        assert pushed.union_at(a) == u.union_at(a)


def test_append_param_pins_new_coordinate():
    u = collision_fixture()
    # e = b
    f = PolyMap(2, [RatFunc(Poly.variable(0, 2))])
    wider = append_param(u, f)
    assert wider.k == 2
    assert wider.union_at([1, 2]) == pts([2])
    assert wider.union_at([1, 3]) == ()


def test_insert_free_param_ignores_new_coordinate():
    u = collision_fixture()
    wider = insert_free_param(u, 0)
    assert wider.k == 2
    assert wider.union_at([7, 1]) == u.union_at([1])


def test_substitute_param_uses_the_member_coordinate():
    u = collision_fixture()
    # y := x turns z - x*y into z - x^2
    reduced = substitute_param(u, 0, 0)
    assert reduced.k == 0
    assert reduced.union_at([]) == pts([1], [4])
    with pytest.raises(DimensionError):
        substitute_param(u, 1, 0)
