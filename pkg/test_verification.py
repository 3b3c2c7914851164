"""Tests for sample grids, reports and the exact oracles."""
import json
from fractions import Fraction

import pytest

from config import config
from descriptors import DefSetDescriptor
from errors import DimensionError
from instance_generator import collision_fixture, single_equation_family
from linear_engine import AffineMapDescriptor, decompose_linear
from monomial_order import OrderIndex, sigma_inv
from polynomials import ParamPoly, Poly, make_point
from rcf_engine import rcf_decompose
from small_sets import SmallSetModel
from ufss_core import UFSS, DecompositionResult, RecursionTrace, TraceStep
from verification import (
    FAIL, PASS, SampleGrid, VerificationReport, brute_force_decompose, verify_choice, verify_injectivity,
    verify_oracle, verify_small_containment, verify_termination_trace, verify_union,
)
from x_descriptors import ExplicitX

GRID = SampleGrid.parse("-2:2:1/2")


def pts(*values):
    return tuple(make_point(v) for v in values)


def test_grid_points():
    grid = SampleGrid.parse("-1:1:1/2")
    assert grid.points(1) == pts([-1], [Fraction(-1, 2)], [0], [Fraction(1, 2)], [1])
    assert grid.points(0) == ((),)
    assert grid.spec() == "-1:1:1/2"


def test_single_axis_is_broadcast():
    assert len(SampleGrid.parse("0:1:1").points(2)) == 4
    grid = SampleGrid.parse("0:1:1, 0:2:1")
    assert len(grid.points(2)) == 6
    with pytest.raises(DimensionError):
        grid.points(3)


def test_random_points_are_seeded():
    first = SampleGrid.parse("0:1:1", random_points=4, seed=3).points(1)
    again = SampleGrid.parse("0:1:1", random_points=4, seed=3).points(1)
    assert first == again
    assert len(first) >= 2
    assert all(0 <= p[0].to_fraction() <= 1 for p in first)


def test_explicit_points():
    grid = SampleGrid.of_points([(1, 2), (0, 0), (1, 2)])
    assert grid.points(2) == pts([0, 0], [1, 2])
    with pytest.raises(DimensionError):
        grid.points(1)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_default_grid_has_at_least_a_hundred_samples(k):
    points = SampleGrid.default(k).points(k)
    assert len(points) >= config.grid.min_points >= 100
    assert make_point([0] * k) in points
    assert make_point([1] * k) in points


def test_default_grid_specs():
    assert config.get_default_grid(0) == ""
    assert config.get_default_grid(1) == "-5:5:1/10"
    assert config.get_default_grid(2) == "-5:5:1,-5:5:1"
    assert config.get_default_grid(3) == "-2:2:1,-2:2:1,-2:2:1"
    assert SampleGrid.default(0).points(0) == ((),)


@pytest.mark.parametrize("spec", ["1:0:1", "0:1:0", "0:1", "a:b:c", "0:1:0.5"])
def test_bad_grid_specs(spec):
    with pytest.raises(ValueError):
        SampleGrid.parse(spec)


def test_report_bookkeeping():
    report = VerificationReport()
    report.add('union', True, detail="3 samples")
    assert report.passed and report.status == PASS
    other = VerificationReport()
    other.add('oracle', False, {"a": ["0"]}, "differs")
    merged = report.merge(other)
    assert merged.status == FAIL
    assert [c.name for c in merged.failures] == ['oracle']
    data = json.loads(merged.to_json())
    assert data["status"] == FAIL
    assert data["checks"][1]["witness"] == {"a": ["0"]}
    assert "OVERALL" in merged.summary_table()
    # the operands are left alone
    assert report.passed and len(report.checks) == 1


def test_passing_witness_is_dropped():
    report = VerificationReport()
    check = report.add('union', True, {"a": ["1"]})
    assert check.witness == {}


def test_verify_union_reports_a_missing_root():
    u = collision_fixture()
    half = DecompositionResult.single(single_equation_family(
        1, 1, Poly(3, {(0, 0, 1): 1, (1, 1, 0): -1}), [(1,)]).mark_injective(), 'LEXMIN')
    report = verify_union(u, half, GRID)
    assert not report.passed
    (failure,) = report.failures
    assert failure.witness["side"] == 'original only'
    assert failure.witness["a"] == ["-2"]
    assert failure.witness["c"] == ["-4"]


def test_verify_union_reports_degenerate_fibers():
    # (x - 1) z vanishes identically at x = 1
    p = ParamPoly.from_poly(Poly(3, {(1, 0, 1): 1, (0, 0, 1): -1}), 1, 1)
    Z = DefSetDescriptor(m=1, k=1, l=1, equations=(p,))
    S = SmallSetModel.base(1, [(1,)])
    u = UFSS(Z, S, ExplicitX(S, 1))
    report = verify_union(u, DecompositionResult(), GRID)
    assert report.failures[0].detail == "degenerate fiber"
    assert report.failures[0].witness["b"] == ["1"]
    assert brute_force_decompose(u, GRID).degenerate
    assert not verify_oracle(u, DecompositionResult(), GRID).passed


def test_verify_injectivity_finds_the_collision():
    u = collision_fixture()
    report = verify_injectivity(DecompositionResult.single(u, 'LEXMIN'), GRID)
    (failure,) = report.failures
    assert failure.witness["a"] == ["0"]
    assert failure.witness["shared"] == ["0"]


def test_oracles_accept_the_engine_output():
    u = collision_fixture()
    result = rcf_decompose(u)
    report = verify_union(u, result, GRID).merge(
        verify_injectivity(result, GRID), verify_small_containment(result, GRID), verify_oracle(u, result, GRID))
    assert report.passed, report.to_json()


def test_brute_force_assigns_least_member():
    brute = brute_force_decompose(collision_fixture(), SampleGrid.parse("0:1:1"))
    assert brute.cover([0]) == pts([0])
    assert brute.sources([0]) == pts([1])
    assert brute.cover([1]) == pts([1], [2])


def test_termination_trace():
    alpha = OrderIndex((1,), 0)
    lower = OrderIndex((0,), 1)
    good = RecursionTrace((1, alpha), [TraceStep('V1-DESCENT', (1, alpha), (0, alpha), 1)])
    assert verify_termination_trace(good).passed
    flat = RecursionTrace((1, alpha), [TraceStep('V2-SUBST', (1, lower), (1, alpha), 1)])
    (failure,) = verify_termination_trace(flat).failures
    assert failure.witness["rule"] == 'V2-SUBST'
    deep = RecursionTrace((0, alpha), [TraceStep('V1-DESCENT', (1, alpha), (0, alpha), sigma_inv(alpha) + 5)])
    (failure,) = verify_termination_trace(deep).failures
    assert failure.witness["bound"] == sigma_inv(alpha) + 1


def test_verify_choice_reports_uncovered_values():
    h = AffineMapDescriptor(1, 1, 1, [[1]], [[0]], [0])
    S = SmallSetModel.base(1, [(0,), (1,)])
    partial = decompose_linear(h, SmallSetModel.base(1, [(0,)]))
    report = verify_choice(h.to_choice_instance(S), partial, SampleGrid.parse("0:0:1"))
    (failure,) = report.failures
    assert failure.name == 'choice_cover'
    assert failure.witness["c"] == ["1"]
    assert failure.witness["in_original"] is True
