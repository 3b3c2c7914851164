"""Tests for instance and decomposition files."""
import json
import random

import pytest

from config import config
from descriptors import DefSetDescriptor
from errors import InstanceParseError
from independent_engine import RegularCellDescriptor, Regularity, decompose_independent
from instance_generator import collision_fixture, random_family, random_independent, random_linear
from instance_io import (
    LinearInstance, decomposition_to_wire, instance_to_wire, parse_decomposition, parse_decomposition_data,
    parse_instance, parse_instance_data, write_json,
)
from linear_engine import decompose_linear
from polynomials import Poly, make_point
from rcf_engine import rcf_decompose
from small_sets import SmallSetModel
from ufss_core import UFSS, ChoiceDecomposition, ChoiceInstance, DecompositionResult, MapDescriptor
from verification import SampleGrid, verify_choice, verify_injectivity

SAMPLES = [[-1], [0], [1], [2]]


def pts(*values):
    return tuple(make_point(v) for v in values)


def linear_document(**changes):
    document = {
        "kind": "linear", "n": 1, "k": 1, "l": 1,
        "r": [["2"]], "s": [["3"]], "b": ["1"],
        "S": {"m": 1, "points": [["0"], ["1"]]},
    }
    document.update(changes)
    return document


def test_ufss_instance_survives_the_wire():
    u = collision_fixture()
    wire = json.loads(json.dumps(instance_to_wire(u)))
    assert wire["kind"] == "ufss"
    back = parse_instance_data(wire)
    assert isinstance(back, UFSS)
    for a in SAMPLES:
        assert back.union_at(a) == u.union_at(a)


def test_linear_instance():
    instance = parse_instance_data(linear_document())
    assert isinstance(instance, LinearInstance)
    dec = decompose_linear(instance.h, instance.S)
    assert dec.union_at([0]) == pts([1], [3])
    assert parse_instance_data(json.loads(json.dumps(instance_to_wire(instance)))).S.points == instance.S.points


def test_algebraic_scalars():
    # sqrt(2) as the root of z^2 - 2 in [1, 2]
    sqrt2 = {"min_poly": ["-2", "0", "1"], "interval": ["1", "2"]}
    instance = parse_instance_data(linear_document(S={"m": 1, "points": [[sqrt2]]}))
    (point,) = instance.S.points
    assert not point[0].is_rational
    assert point[0] * point[0] == make_point([2])[0]


def test_zero_denominator_is_located():
    with pytest.raises(InstanceParseError) as excinfo:
        parse_instance_data(linear_document(b=["1/0"]))
    assert excinfo.value.pointer == "/b/0"


def test_unknown_fields_are_rejected():
    with pytest.raises(InstanceParseError) as excinfo:
        parse_instance_data(linear_document(extra=1))
    assert excinfo.value.pointer == "/extra"
    with pytest.raises(InstanceParseError):
        parse_instance_data(linear_document(kind="quadratic"))


@pytest.mark.parametrize("as_list", [False, True])
def test_equation_field_accepts_p(as_list):
    u = collision_fixture()
    wire = json.loads(json.dumps(instance_to_wire(u)))
    (equation,) = wire["Z"].pop("equations")
    wire["Z"]["p"] = [equation] if as_list else equation
    back = parse_instance_data(wire)
    for a in SAMPLES:
        assert back.union_at(a) == u.union_at(a)
    assert "p" not in instance_to_wire(back)["Z"]


def test_p_and_equations_together_are_rejected():
    wire = json.loads(json.dumps(instance_to_wire(collision_fixture())))
    wire["Z"]["p"] = wire["Z"]["equations"][0]
    with pytest.raises(InstanceParseError) as excinfo:
        parse_instance_data(wire)
    assert excinfo.value.pointer == "/Z"


def test_arity_errors_become_parse_errors():
    with pytest.raises(InstanceParseError):
        parse_instance_data(linear_document(r=[["1", "2"]]))


def test_file_errors(tmp_path):
    with pytest.raises(InstanceParseError, match="not found"):
        parse_instance(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(InstanceParseError, match="Invalid JSON"):
        parse_instance(broken)


def test_independent_instance_keeps_its_cells():
    width = 2
    h = MapDescriptor.from_polys(1, 1, [Poly(width, {(1, 0): 1, (0, 1): 1})])
    S = SmallSetModel.base(1, [(1,), (2,)])
    cell = RegularCellDescriptor(DefSetDescriptor.region(1, 1),
                                 h_regularity=(Regularity.STRICT_INC, Regularity.STRICT_INC))
    instance = ChoiceInstance(1, 1, 1, h, S, DefSetDescriptor.region(1, 1), (cell,))
    back = parse_instance_data(json.loads(json.dumps(instance_to_wire(instance))))
    assert isinstance(back, ChoiceInstance)
    assert back.cells[0].h_regularity == (Regularity.STRICT_INC, Regularity.STRICT_INC)
    dec = decompose_independent(back.cells, back.h, back.S)
    assert dec.union_at([0]) == pts([1], [2])


def test_ufss_decomposition_survives_the_wire():
    u = collision_fixture()
    result = rcf_decompose(u)
    wire = json.loads(json.dumps(decomposition_to_wire(result)))
    assert wire["kind"] == "ufss_decomposition"
    back = parse_decomposition_data(wire)
    assert isinstance(back, DecompositionResult)
    assert back.provenance == result.provenance
    assert len(back.traces) == len(result.traces)
    assert back.traces[0].initial == result.traces[0].initial
    for a in SAMPLES:
        assert back.union_at(a) == result.union_at(a)
    assert verify_injectivity(back, SampleGrid.parse("-2:2:1/2")).passed


def test_shared_nodes_are_stored_once():
    u = collision_fixture()
    result = DecompositionResult((u, u), (('LEXMIN',), ('LEXMIN',)))
    wire = decomposition_to_wire(result)
    assert wire["pieces"][0]["Z"] == wire["pieces"][1]["Z"]
    assert sum(1 for d in wire["defs"] if d["type"] == "DefSet") == 1


def test_choice_decomposition_survives_the_wire():
    instance = parse_instance_data(linear_document())
    dec = decompose_linear(instance.h, instance.S)
    back = parse_decomposition_data(json.loads(json.dumps(decomposition_to_wire(dec))))
    assert isinstance(back, ChoiceDecomposition)
    assert back.provenance == dec.provenance
    assert verify_choice(instance.choice, back, SampleGrid.parse("-1:1:1")).passed


def test_broken_references_are_located():
    wire = decomposition_to_wire(rcf_decompose(collision_fixture()))
    wire["pieces"][0]["Z"] = {"$ref": "#/defs/999"}
    with pytest.raises(InstanceParseError) as excinfo:
        parse_decomposition_data(wire)
    assert excinfo.value.pointer == "/pieces/0/Z"


def test_unknown_provenance_tag_is_rejected():
    wire = decomposition_to_wire(rcf_decompose(collision_fixture()))
    wire["pieces"][0]["provenance"] = ["GUESSED"]
    with pytest.raises(InstanceParseError):
        parse_decomposition_data(wire)


def test_write_json_is_deterministic(tmp_path):
    path = tmp_path / "nested" / "out.json"
    write_json(path, {"b": 1, "a": [1, 2]})
    text = path.read_text()
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    dec = decompose_linear(parse_instance_data(linear_document()).h, SmallSetModel.base(1, [(0,)]))
    out = tmp_path / "dec.json"
    write_json(out, decomposition_to_wire(dec))
    assert parse_decomposition(out).union_at([0]) == pts([1])


def generated_instances(count, seed):
    rng = random.Random(seed)
    makers = (random_family, random_linear, random_independent)
    return [makers[index % len(makers)](rng, config.generator) for index in range(count)]


def image_at_origin(instance):
    if isinstance(instance, UFSS):
        return instance.union_at([0] * instance.k)
    choice = instance.choice if isinstance(instance, LinearInstance) else instance
    return choice.image_at([0] * choice.k)


def test_generated_instances_survive_the_wire(tmp_path):
    for index, instance in enumerate(generated_instances(200, seed=2024)):
        wire = json.loads(json.dumps(instance_to_wire(instance)))
        back = parse_instance_data(wire)
        assert type(back) is type(instance)
        assert json.loads(json.dumps(instance_to_wire(back))) == wire
        assert image_at_origin(back) == image_at_origin(instance)
        first, second = tmp_path / f"{index}a.json", tmp_path / f"{index}b.json"
        write_json(first, instance_to_wire(back))
        write_json(second, wire)
        assert first.read_bytes() == second.read_bytes()
