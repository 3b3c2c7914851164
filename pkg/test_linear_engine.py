"""Tests for the affine-map choice decomposition."""
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from config import config
from descriptors import DefSetDescriptor
from errors import DimensionError
from instance_generator import random_linear
from linear_engine import AffineMapDescriptor, decompose_linear, translation
from polynomials import Condition, Poly, make_point
from small_sets import SmallSetModel
from verification import SampleGrid, verify_choice


def pts(*values):
    return tuple(make_point(v) for v in values)


def test_single_piece_with_translated_image():
    # h = 2g + 3a + 1 on S = {0, 1}
    h = AffineMapDescriptor(1, 1, 1, [[2]], [[3]], [1])
    S = SmallSetModel.base(1, [(0,), (1,)])
    dec = decompose_linear(h, S)
    assert len(dec.pieces) == 1
    assert dec.provenance == (('LINEAR',),)
    piece = dec.pieces[0]
    assert piece.Y.points == pts([0], [2])
    assert piece.X.x_fiber([0]) == pts([0], [2])
    assert dec.union_at([0]) == pts([1], [3])
    assert dec.union_at([1]) == pts([4], [6])


def test_collisions_collapse_in_the_image():
    # h = g1 + g2 identifies (1, 0) and (0, 1)
    h = AffineMapDescriptor(2, 1, 1, [[1, 1]], [[0]], [0])
    S = SmallSetModel.base(2, [(1, 0), (0, 1), (2, 2)])
    dec = decompose_linear(h, S)
    assert dec.pieces[0].Y.points == pts([1], [4])
    report = verify_choice(h.to_choice_instance(S), dec, SampleGrid.parse("-1:1:1"))
    assert report.passed


def test_domain_conditions_restrict_members():
    # domain g <= a
    domain = DefSetDescriptor.region(1, 1, [Condition(Poly(2, {(0, 1): 1, (1, 0): -1}), '>=')])
    h = AffineMapDescriptor(1, 1, 1, [[1]], [[1]], [0], domain)
    S = SmallSetModel.base(1, [(0,), (5,)])
    dec = decompose_linear(h, S)
    assert dec.union_at([1]) == pts([1])
    assert dec.union_at([5]) == pts([5], [10])
    assert verify_choice(h.to_choice_instance(S), dec, SampleGrid.parse("0:6:1")).passed


def test_translation_map():
    h = AffineMapDescriptor(2, 1, 2, [[1, 0], [0, 1]], [[1], [-1]], [0, Fraction(1, 2)])
    t = translation(h)
    assert (t.n, t.k, t.l) == (2, 1, 2)
    assert t.evaluate([3, 4], [1]) == tuple(make_point([4, Fraction(7, 2)]))
    assert h.evaluate([3, 4], [1]) == tuple(make_point([4, Fraction(7, 2)]))


def test_arity_errors():
    with pytest.raises(DimensionError):
        AffineMapDescriptor(1, 1, 1, [[1, 2]], [[1]], [0])
    with pytest.raises(DimensionError):
        AffineMapDescriptor(1, 1, 2, [[1]], [[1]], [0])
    h = AffineMapDescriptor(1, 1, 1, [[1]], [[1]], [0])
    with pytest.raises(DimensionError):
        decompose_linear(h, SmallSetModel.base(2, [(0, 0)]))


coefficient = st.integers(min_value=-3, max_value=3)


@settings(max_examples=25, deadline=None)
@given(
    st.lists(coefficient, min_size=2, max_size=2),
    coefficient,
    coefficient,
    st.sets(st.tuples(coefficient, coefficient), min_size=1, max_size=5),
)
def test_random_affine_maps_verify(r, s, b, points):
    h = AffineMapDescriptor(2, 1, 1, [r], [[s]], [b])
    S = SmallSetModel.base(2, points)
    dec = decompose_linear(h, S)
    assert verify_choice(h.to_choice_instance(S), dec, SampleGrid.parse("-1:1:1/2")).passed


@pytest.mark.parametrize("seed", range(50))
def test_generated_affine_maps_verify_on_the_default_grid(seed):
    instance = random_linear(random.Random(seed), config.generator)
    grid = SampleGrid.default(instance.h.k)
    assert len(grid.points(instance.h.k)) >= config.grid.min_points
    dec = decompose_linear(instance.h, instance.S)
    assert verify_choice(instance.choice, dec, grid).passed
