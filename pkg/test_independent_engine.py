"""Tests for the cell-by-cell choice decomposition."""
import random

import pytest

from config import config
from descriptors import DefSetDescriptor
from errors import ContractViolation, NormalFormError
from independent_engine import RegularCellDescriptor, Regularity, decompose_independent
from instance_generator import random_independent
from monomial_order import OrderIndex
from polynomials import Condition, ParamPoly, Poly, RatFunc, make_point
from small_sets import SmallSetModel
from ufss_core import ChoiceInstance, MapDescriptor, MapPiece
from verification import SampleGrid, verify_choice

INC = Regularity.STRICT_INC


def pts(*values):
    return tuple(make_point(v) for v in values)


def open_cell(n, k, ambient=()):
    return RegularCellDescriptor(DefSetDescriptor.region(n, k, ambient), h_regularity=(INC,) * (n + k))


def coordinate_sum(n, k):
    width = n + k
    return MapDescriptor.from_polys(n, k, [Poly(width, {tuple(int(i == j) for i in range(width)): 1
                                                        for j in range(width)})])


def test_open_cell_keeps_least_member_of_each_class():
    # h = y1 + y2 + a on S = {(1,2), (2,1)}
    h = coordinate_sum(2, 1)
    S = SmallSetModel.base(2, [(1, 2), (2, 1)])
    dec = decompose_independent([open_cell(2, 1)], h, S)
    assert dec.provenance == (('LEXMIN',),)
    assert dec.pieces[0].X.x_fiber([0]) == pts([1, 2])
    assert dec.union_at([0]) == pts([3])
    instance = ChoiceInstance(2, 1, 1, h, S, DefSetDescriptor.region(2, 1))
    assert verify_choice(instance, dec, SampleGrid.parse("-1:1:1/2")).passed


def test_open_cell_must_be_regular():
    h = coordinate_sum(1, 1)
    S = SmallSetModel.base(1, [(1,)])
    irregular = RegularCellDescriptor(DefSetDescriptor.region(1, 1), regular=False, strongly_regular=False,
                                      h_regularity=(INC, INC))
    with pytest.raises(ContractViolation):
        decompose_independent([irregular], h, S)
    missing_tags = RegularCellDescriptor(DefSetDescriptor.region(1, 1), h_regularity=(INC,))
    with pytest.raises(ContractViolation):
        decompose_independent([missing_tags], h, S)


def test_parameter_section_is_lifted():
    # cell {y = 1} over (x, y), h = x + y
    h = coordinate_sum(1, 1)
    S = SmallSetModel.base(1, [(1,), (2,), (3,)])
    on_line = Condition(Poly(2, {(0, 1): 1, (0, 0): -1}), '=')
    cell = RegularCellDescriptor(
        DefSetDescriptor.region(1, 1, [on_line]),
        missing_coordinate=1,
        section=ParamPoly.constant(1, 1, 1),
        reduced=open_cell(1, 0),
    )
    dec = decompose_independent([cell], h, S)
    assert dec.provenance == (('L35-RESTRICT', 'LEXMIN'),)
    assert dec.union_at([1]) == pts([2], [3], [4])
    assert dec.union_at([0]) == ()
    instance = ChoiceInstance(1, 1, 1, h, S, DefSetDescriptor.region(1, 1, [on_line]))
    assert verify_choice(instance, dec, SampleGrid.parse("-1:2:1/2")).passed


def test_x_section_projects_the_small_set():
    # cell {x2 = 2 x1}, h = x1 + x2 + y
    h = coordinate_sum(2, 1)
    S = SmallSetModel.base(2, [(1, 2), (2, 4), (1, 3)])
    on_graph = Condition(Poly(3, {(0, 1, 0): 1, (1, 0, 0): -2}), '=')
    section = ParamPoly.monomial(OrderIndex.zero(1), RatFunc(Poly(2, {(1, 0): 2})))
    cell = RegularCellDescriptor(
        DefSetDescriptor.region(2, 1, [on_graph]),
        missing_coordinate=1,
        section=section,
        reduced=open_cell(1, 1),
    )
    dec = decompose_independent([cell], h, S)
    assert dec.pieces[0].Y.points == pts([1], [2])
    assert dec.union_at([0]) == pts([3], [6])
    instance = ChoiceInstance(2, 1, 1, h, S, DefSetDescriptor.region(2, 1, [on_graph]))
    assert verify_choice(instance, dec, SampleGrid.parse("-1:1:1")).passed


def test_parameter_dependent_x_section_is_rejected():
    h = coordinate_sum(2, 1)
    S = SmallSetModel.base(2, [(1, 2)])
    section = ParamPoly.monomial(OrderIndex((1,), 0), RatFunc.constant(1, 2))
    cell = RegularCellDescriptor(
        DefSetDescriptor.region(2, 1),
        missing_coordinate=1,
        section=section,
        reduced=open_cell(1, 1),
    )
    with pytest.raises(NormalFormError):
        decompose_independent([cell], h, S)


def test_graph_cell_needs_section_and_reduced_cell():
    with pytest.raises(NormalFormError):
        RegularCellDescriptor(DefSetDescriptor.region(1, 1), missing_coordinate=0)


def test_multi_piece_map_is_rejected():
    piece = MapDescriptor.from_polys(1, 1, [Poly(2, {(1, 0): 1})]).pieces[0]
    h = MapDescriptor(1, 1, 1, [piece, piece])
    with pytest.raises(NormalFormError):
        decompose_independent([open_cell(1, 1)], h, SmallSetModel.base(1, [(1,)]))


@pytest.mark.parametrize("seed", range(30))
def test_generated_cell_maps_verify(seed):
    instance = random_independent(random.Random(seed), config.generator)
    dec = decompose_independent(instance.cells, instance.h, instance.S)
    assert dec.provenance == (('LEXMIN',),)
    assert verify_choice(instance, dec, SampleGrid.default(instance.k)).passed
