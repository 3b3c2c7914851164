"""
JSON wire format of instances, decompositions and recursion traces.

Instance files are validated with pydantic; the first validation error is
reported as an InstanceParseError carrying a JSON pointer. Decomposition
files share their descriptors, small sets and families through a ``defs``
list addressed by ``{"$ref": "#/defs/N"}`` so that families built on top
of one another are stored once.
"""
import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import (
    BaseModel, BeforeValidator, ConfigDict, Field, NonNegativeInt, PrivateAttr, TypeAdapter, ValidationError,
    model_validator,
)

from algebraic_real import AlgebraicReal, format_rational, parse_rational
from descriptors import DefSetDescriptor, Selection
from errors import InstanceParseError, UfssError
from independent_engine import Regularity, RegularCellDescriptor
from linear_engine import AffineMapDescriptor
from monomial_order import OrderIndex
from polynomials import Condition, ParamPoly, Poly, PolyMap, RatFunc, Relation
from small_sets import Derivation, SmallSetModel
from ufss_core import (
    PROVENANCE_TAGS, UFSS, ChoiceDecomposition, ChoiceInstance, ChoicePiece, DecompositionResult, MapDescriptor,
    MapPiece, RecursionTrace, RootSelector, TraceStep,
)
from x_descriptors import (
    AppendedX, CollidingPairFilter, ConditionFilter, CoveredFilter, ExplicitX, FilteredX, ImageFilter, ImageX,
    IsolatedFilter, ProductX, RepresentativeFilter, SubstitutedX, WidenedX, XDescriptor, XKind, XPredicate,
    ZeroTestFilter,
)

logger = logging.getLogger(__name__)


def _rational(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return parse_rational(value)


Rational = Annotated[Fraction, BeforeValidator(_rational)]


class _Wire(BaseModel):
    model_config = ConfigDict(extra='forbid', arbitrary_types_allowed=True, populate_by_name=True)


class _Buildable(_Wire):
    """A wire model that turns itself into an engine object once validated."""

    _built: Any = PrivateAttr(default=None)

    @model_validator(mode='after')
    def _build_now(self):
        try:
            self._built = self._build()
        except (UfssError, ValueError, TypeError) as e:
            raise ValueError(str(e)) from e
        return self

    def _build(self) -> Any:
        raise NotImplementedError

    @property
    def value(self) -> Any:
        return self._built


# -- exact algebra ------------------------------------------------------------------

class TermModel(_Wire):
    exponents: List[NonNegativeInt]
    coeff: Rational


class PolyModel(_Buildable):
    nvars: NonNegativeInt
    terms: List[TermModel] = []

    def _build(self) -> Poly:
        return Poly.from_terms(self.nvars, [(tuple(t.exponents), t.coeff) for t in self.terms])


class RatFuncModel(_Buildable):
    numer: PolyModel
    denom: Optional[PolyModel] = None

    def _build(self) -> RatFunc:
        return RatFunc(self.numer.value, self.denom.value if self.denom else None)


class ParamTermModel(_Wire):
    y: List[NonNegativeInt]
    z: NonNegativeInt
    coeff: RatFuncModel


class ParamPolyModel(_Buildable):
    n: NonNegativeInt
    k: NonNegativeInt
    terms: List[ParamTermModel] = []

    def _build(self) -> ParamPoly:
        coeffs: Dict[OrderIndex, RatFunc] = {}
        for t in self.terms:
            index = OrderIndex(tuple(t.y), t.z)
            coeffs[index] = coeffs[index] + t.coeff.value if index in coeffs else t.coeff.value
        return ParamPoly(self.n, self.k, coeffs)


class ConditionModel(_Buildable):
    poly: PolyModel
    relation: Relation

    def _build(self) -> Condition:
        return Condition(self.poly.value, self.relation)


class AlgebraicModel(_Buildable):
    min_poly: List[Rational]
    interval: Tuple[Rational, Rational]

    def _build(self) -> AlgebraicReal:
        return AlgebraicReal.from_root(self.min_poly, *self.interval)


Scalar = Union[Rational, AlgebraicModel]


def _scalar_value(value: Any) -> AlgebraicReal:
    if isinstance(value, AlgebraicModel):
        return value.value
    return AlgebraicReal.from_rational(value)


class PolyMapModel(_Buildable):
    n_in: NonNegativeInt
    components: List[RatFuncModel]

    def _build(self) -> PolyMap:
        return PolyMap(self.n_in, [c.value for c in self.components])


class SelectionModel(_Buildable):
    index: int
    bound: int

    def _build(self) -> Selection:
        return Selection(self.index, self.bound)


class DefSetModel(_Buildable):
    m: NonNegativeInt
    k: NonNegativeInt
    l: NonNegativeInt
    equations: List[ParamPolyModel] = []
    strict: List[PolyModel] = []
    side_equations: List[PolyModel] = []
    ambient: List[ConditionModel] = []
    guards: List[RatFuncModel] = []
    nondegenerate: bool = False
    coordinate_selections: List[Optional[SelectionModel]] = []
    selection: Optional[SelectionModel] = None

    @model_validator(mode='before')
    @classmethod
    def _accept_p(cls, data: Any) -> Any:
        """``p`` names the equations too: one ParamPoly or a list of them."""
        if not isinstance(data, dict) or 'p' not in data:
            return data
        if 'equations' in data:
            raise ValueError("Give either p or equations, not both")
        data = dict(data)
        p = data.pop('p')
        data['equations'] = p if isinstance(p, list) else [p]
        return data

    def _build(self) -> DefSetDescriptor:
        return DefSetDescriptor(
            m=self.m, k=self.k, l=self.l,
            equations=tuple(p.value for p in self.equations),
            strict=tuple(p.value for p in self.strict),
            side_equations=tuple(p.value for p in self.side_equations),
            ambient=tuple(c.value for c in self.ambient),
            guards=tuple(g.value for g in self.guards),
            nondegenerate=self.nondegenerate,
            coordinate_selections=tuple(s.value if s else None for s in self.coordinate_selections),
            selection=self.selection.value if self.selection else None,
        )


class SmallSetWire(_Buildable):
    m: NonNegativeInt
    points: List[List[Scalar]]

    def _build(self) -> SmallSetModel:
        return SmallSetModel.base(self.m, [[_scalar_value(v) for v in p] for p in self.points])


# -- serializers of exact algebra ----------------------------------------------------

def scalar_to_wire(value: AlgebraicReal) -> Any:
    if value.is_rational:
        return format_rational(value.to_fraction())
    lo, hi = value.interval
    return {"min_poly": [format_rational(c) for c in value.min_poly],
            "interval": [format_rational(lo), format_rational(hi)]}


def point_to_wire(point: Sequence[AlgebraicReal]) -> List[Any]:
    return [scalar_to_wire(v) for v in point]


def poly_to_wire(p: Poly) -> Dict[str, Any]:
    return {"nvars": p.nvars,
            "terms": [{"exponents": list(e), "coeff": format_rational(c)} for e, c in p.sorted_terms()]}


def ratfunc_to_wire(f: RatFunc) -> Dict[str, Any]:
    wire = {"numer": poly_to_wire(f.numer)}
    if not (f.denom.is_constant() and f.denom.constant_value() == 1):
        wire["denom"] = poly_to_wire(f.denom)
    return wire


def parampoly_to_wire(p: ParamPoly) -> Dict[str, Any]:
    return {"n": p.n, "k": p.k, "terms": [
        {"y": list(i.exponents), "z": i.z_degree, "coeff": ratfunc_to_wire(p.coeff(i))} for i in p.support()
    ]}


def condition_to_wire(c: Condition) -> Dict[str, Any]:
    return {"poly": poly_to_wire(c.poly), "relation": c.relation.value}


def polymap_to_wire(f: PolyMap) -> Dict[str, Any]:
    return {"n_in": f.n_in, "components": [ratfunc_to_wire(c) for c in f.components]}


def selection_to_wire(s: Optional[Selection]) -> Optional[Dict[str, int]]:
    return None if s is None else {"index": s.index, "bound": s.bound}


def defset_to_wire(Z: DefSetDescriptor) -> Dict[str, Any]:
    return {
        "m": Z.m, "k": Z.k, "l": Z.l,
        "equations": [parampoly_to_wire(p) for p in Z.equations],
        "strict": [poly_to_wire(q) for q in Z.strict],
        "side_equations": [poly_to_wire(q) for q in Z.side_equations],
        "ambient": [condition_to_wire(c) for c in Z.ambient],
        "guards": [ratfunc_to_wire(g) for g in Z.guards],
        "nondegenerate": Z.nondegenerate,
        "coordinate_selections": [selection_to_wire(s) for s in Z.coordinate_selections],
        "selection": selection_to_wire(Z.selection),
    }


# -- instance documents ----------------------------------------------------------------

class ExplicitXWire(_Wire):
    kind: Literal['EXPLICIT'] = 'EXPLICIT'
    constraints: List[ConditionModel] = []


class UfssInstanceModel(_Buildable):
    kind: Literal['ufss']
    Z: DefSetModel
    S: SmallSetWire
    X: Optional[ExplicitXWire] = None

    def _build(self) -> UFSS:
        Z, S = self.Z.value, self.S.value
        constraints = [c.value for c in self.X.constraints] if self.X else Z.membership_conditions()
        return UFSS(Z, S, ExplicitX(S, Z.k, constraints))


@dataclass(frozen=True)
class LinearInstance:
    """An affine map together with the small set it is restricted to."""

    h: AffineMapDescriptor
    S: SmallSetModel

    @property
    def choice(self) -> ChoiceInstance:
        return self.h.to_choice_instance(self.S)


class LinearInstanceModel(_Buildable):
    kind: Literal['linear']
    n: NonNegativeInt
    k: NonNegativeInt
    l: NonNegativeInt
    r: List[List[Rational]]
    s: List[List[Rational]]
    b: List[Rational]
    domain: Optional[DefSetModel] = None
    S: SmallSetWire

    def _build(self) -> LinearInstance:
        h = AffineMapDescriptor(self.n, self.k, self.l, self.r, self.s, self.b,
                                self.domain.value if self.domain else None)
        return LinearInstance(h, self.S.value)


class CellModel(_Buildable):
    cell: DefSetModel
    regular: bool = True
    strongly_regular: bool = True
    h_regularity: List[Regularity] = []
    missing_coordinate: Optional[NonNegativeInt] = None
    section: Optional[ParamPolyModel] = None
    reduced: Optional['CellModel'] = None

    def _build(self) -> RegularCellDescriptor:
        return RegularCellDescriptor(
            cell=self.cell.value,
            regular=self.regular,
            strongly_regular=self.strongly_regular,
            h_regularity=tuple(self.h_regularity),
            missing_coordinate=self.missing_coordinate,
            section=self.section.value if self.section else None,
            reduced=self.reduced.value if self.reduced else None,
        )


CellModel.model_rebuild()


class IndependentInstanceModel(_Buildable):
    kind: Literal['indep']
    n: NonNegativeInt
    k: NonNegativeInt
    h: List[PolyModel]
    domain: Optional[DefSetModel] = None
    S: SmallSetWire
    cells: List[CellModel]

    def _build(self) -> ChoiceInstance:
        domain = self.domain.value if self.domain else DefSetDescriptor.region(self.n, self.k)
        h = MapDescriptor.from_polys(self.n, self.k, [p.value for p in self.h], domain)
        return ChoiceInstance(self.n, self.k, len(self.h), h, self.S.value, domain,
                              tuple(c.value for c in self.cells))


InstanceDocument = TypeAdapter(Annotated[
    Union[UfssInstanceModel, LinearInstanceModel, IndependentInstanceModel],
    Field(discriminator='kind'),
])

Instance = Union[UFSS, LinearInstance, ChoiceInstance]


def _pointer(error: ValidationError, data: Any) -> str:
    loc = list(error.errors()[0]['loc'])
    if loc and isinstance(data, dict) and loc[0] == data.get('kind'):
        loc = loc[1:]
    return "/" + "/".join(str(part).replace('~', '~0').replace('/', '~1') for part in loc)


def _load_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as e:
        raise InstanceParseError(f"File not found: {path}") from e
    except json.JSONDecodeError as e:
        raise InstanceParseError(f"Invalid JSON at line {e.lineno}: {e.msg}") from e


def parse_instance_data(data: Any) -> Instance:
    try:
        return InstanceDocument.validate_python(data).value
    except ValidationError as e:
        raise InstanceParseError(e.errors()[0]['msg'], _pointer(e, data)) from e


def parse_instance(path: Path) -> Instance:
    """
    Read and validate an instance file.

    Args:
        path: JSON file with ``kind`` in {ufss, linear, indep}

    Returns:
        UFSS, LinearInstance or ChoiceInstance (with its cells)

    Raises:
        InstanceParseError: with the JSON pointer of the first offending value
    """
    instance = parse_instance_data(_load_json(path))
    logger.info(f"Parsed {type(instance).__name__} from {path}")
    return instance


def _cell_to_wire(cell: RegularCellDescriptor) -> Dict[str, Any]:
    return {
        "cell": defset_to_wire(cell.cell),
        "regular": cell.regular,
        "strongly_regular": cell.strongly_regular,
        "h_regularity": [t.value for t in cell.h_regularity],
        "missing_coordinate": cell.missing_coordinate,
        "section": parampoly_to_wire(cell.section) if cell.section is not None else None,
        "reduced": _cell_to_wire(cell.reduced) if cell.reduced is not None else None,
    }


def instance_to_wire(instance: Instance) -> Dict[str, Any]:
    """Inverse of ``parse_instance_data`` for the three instance kinds."""
    if isinstance(instance, UFSS):
        if not isinstance(instance.X, ExplicitX):
            raise InstanceParseError("Only families with an explicit X are instances", "/X")
        return {
            "kind": "ufss",
            "Z": defset_to_wire(instance.Z),
            "S": {"m": instance.S.m, "points": [point_to_wire(p) for p in instance.S.points]},
            "X": {"kind": "EXPLICIT", "constraints": [condition_to_wire(c) for c in instance.X.constraints]},
        }
    if isinstance(instance, LinearInstance):
        h = instance.h
        return {
            "kind": "linear", "n": h.n, "k": h.k, "l": h.l,
            "r": [[format_rational(v) for v in row] for row in h.r],
            "s": [[format_rational(v) for v in row] for row in h.s],
            "b": [format_rational(v) for v in h.b],
            "domain": defset_to_wire(h.domain),
            "S": {"m": instance.S.m, "points": [point_to_wire(p) for p in instance.S.points]},
        }
    return {
        "kind": "indep", "n": instance.n, "k": instance.k,
        "h": [_map_component_to_wire(c, instance.n, instance.k) for c in instance.h.pieces[0].components],
        "domain": defset_to_wire(instance.domain),
        "S": {"m": instance.S.m, "points": [point_to_wire(p) for p in instance.S.points]},
        "cells": [_cell_to_wire(c) for c in instance.cells],
    }


def _map_component_to_wire(component: ParamPoly, n: int, k: int) -> Dict[str, Any]:
    """A z-free component over (x; y) as a polynomial in n + k variables."""
    pairs = []
    for index in component.support():
        coeff = component.coeff(index)
        if not coeff.denom.is_constant():
            raise InstanceParseError(f"Map component {component} is not polynomial", "/h")
        scale = coeff.denom.constant_value()
        for exponents, value in coeff.numer.sorted_terms():
            pairs.append((tuple(exponents) + index.exponents, value / scale))
    return poly_to_wire(Poly.from_terms(n + k, pairs))


# -- decomposition documents -----------------------------------------------------------

def _ref(index: int) -> Dict[str, str]:
    return {"$ref": f"#/defs/{index}"}


class _GraphEncoder:
    """Stores every shared node once in ``defs``; nodes refer to each other by index."""

    def __init__(self):
        self.defs: List[Optional[Dict[str, Any]]] = []
        self._index: Dict[int, int] = {}
        self._alive: List[Any] = []

    def ref(self, node: Any) -> Dict[str, str]:
        key = id(node)
        if key not in self._index:
            self._index[key] = len(self.defs)
            self._alive.append(node)
            self.defs.append(None)
            self.defs[self._index[key]] = self._encode(node)
        return _ref(self._index[key])

    def _encode(self, node: Any) -> Dict[str, Any]:
        if isinstance(node, DefSetDescriptor):
            return {"type": "DefSet", **defset_to_wire(node)}
        if isinstance(node, SmallSetModel):
            return {
                "type": "SmallSet", "m": node.m,
                "points": [point_to_wire(p) for p in node.points],
                "derivation": node.derivation.value,
                "parents": [self.ref(p) for p in node.parents],
                "mapping": polymap_to_wire(node.mapping) if node.mapping is not None else None,
            }
        if isinstance(node, XDescriptor):
            return self._encode_x(node)
        if isinstance(node, XPredicate):
            return self._encode_predicate(node)
        if isinstance(node, MapDescriptor):
            return {"type": "Map", "n": node.n, "k": node.k, "l": node.l, "pieces": [
                {"domain": self.ref(p.domain), "components": [parampoly_to_wire(c) for c in p.components]}
                for p in node.pieces
            ]}
        if isinstance(node, RootSelector):
            return {"type": "RootSelector", "Z": self.ref(node.Z), "j": node.j, "q": node.q}
        if isinstance(node, ChoiceInstance):
            return {"type": "ChoiceInstance", "n": node.n, "k": node.k, "l": node.l,
                    "h": self.ref(node.h), "S": self.ref(node.S), "domain": self.ref(node.domain)}
        raise TypeError(f"Cannot serialize {type(node).__name__}")

    def _encode_x(self, X: XDescriptor) -> Dict[str, Any]:
        wire = {"type": "X", "kind": X.kind.value, "k": X.k, "model": self.ref(X.model)}
        if isinstance(X, ExplicitX):
            wire["constraints"] = [condition_to_wire(c) for c in X.constraints]
        elif isinstance(X, ImageX):
            wire.update(parent=self.ref(X.parent), mapping=polymap_to_wire(X.mapping))
        elif isinstance(X, FilteredX):
            wire.update(parent=self.ref(X.parent), predicate=self.ref(X.predicate))
        elif isinstance(X, ProductX):
            wire["parents"] = [self.ref(p) for p in X.parents]
        elif isinstance(X, AppendedX):
            wire.update(parent=self.ref(X.parent), mapping=polymap_to_wire(X.mapping), position=X.position)
        elif isinstance(X, WidenedX):
            wire.update(parent=self.ref(X.parent), position=X.position, count=X.count)
        elif isinstance(X, SubstitutedX):
            wire.update(parent=self.ref(X.parent), position=X.position, source=X.source)
        return wire

    def _encode_predicate(self, p: XPredicate) -> Dict[str, Any]:
        wire: Dict[str, Any] = {"type": "Predicate", "name": p.name}
        if isinstance(p, ConditionFilter):
            wire["conditions"] = [condition_to_wire(c) for c in p.conditions]
        elif isinstance(p, ZeroTestFilter):
            wire.update(r=parampoly_to_wire(p.r), vanishing=p.vanishing)
        elif isinstance(p, (IsolatedFilter, CollidingPairFilter)):
            wire["Z"] = self.ref(p.Z)
        elif isinstance(p, CoveredFilter):
            wire.update(Z=self.ref(p.Z), inner_z=self.ref(p.inner_z), inner_x=self.ref(p.inner_x))
        elif isinstance(p, RepresentativeFilter):
            wire.update(Z=self.ref(p.Z), cap=p.cap)
        elif isinstance(p, ImageFilter):
            wire.update(h=self.ref(p.h), target=self.ref(p.target))
        else:
            raise TypeError(f"Cannot serialize predicate {type(p).__name__}")
        return wire


class _GraphDecoder:
    def __init__(self, defs: Sequence[Any]):
        self.defs = defs
        self._nodes: Dict[int, Any] = {}

    def node(self, ref: Any, pointer: str) -> Any:
        if not isinstance(ref, dict) or not str(ref.get("$ref", "")).startswith("#/defs/"):
            raise InstanceParseError("Expected a reference into defs", pointer)
        try:
            index = int(ref["$ref"][len("#/defs/"):])
        except ValueError as e:
            raise InstanceParseError("Malformed reference", pointer) from e
        if not 0 <= index < len(self.defs):
            raise InstanceParseError(f"Reference to missing definition {index}", pointer)
        if index not in self._nodes:
            at = f"/defs/{index}"
            try:
                self._nodes[index] = self._decode(self.defs[index], at)
            except InstanceParseError:
                raise
            except ValidationError as e:
                raise InstanceParseError(e.errors()[0]['msg'], at + _pointer(e, None)) from e
            except (KeyError, TypeError, ValueError, UfssError) as e:
                raise InstanceParseError(f"Invalid {self.defs[index].get('type', 'node')}: {e}", at) from e
        return self._nodes[index]

    def _decode(self, wire: Dict[str, Any], at: str) -> Any:
        kind = wire["type"]
        if kind == "DefSet":
            return DefSetModel.model_validate({k: v for k, v in wire.items() if k != "type"}).value
        if kind == "SmallSet":
            points = SmallSetWire.model_validate({"m": wire["m"], "points": wire["points"]}).value.points
            mapping = PolyMapModel.model_validate(wire["mapping"]).value if wire.get("mapping") else None
            parents = [self.node(p, f"{at}/parents/{i}") for i, p in enumerate(wire["parents"])]
            return SmallSetModel(wire["m"], points, Derivation(wire["derivation"]), parents, mapping)
        if kind == "X":
            return self._decode_x(wire, at)
        if kind == "Predicate":
            return self._decode_predicate(wire, at)
        if kind == "Map":
            pieces = []
            for i, p in enumerate(wire["pieces"]):
                components = tuple(ParamPolyModel.model_validate(c).value for c in p["components"])
                pieces.append(MapPiece(self.node(p["domain"], f"{at}/pieces/{i}/domain"), components))
            return MapDescriptor(wire["n"], wire["k"], wire["l"], pieces)
        if kind == "RootSelector":
            return RootSelector(self.node(wire["Z"], f"{at}/Z"), wire["j"], wire["q"])
        if kind == "ChoiceInstance":
            return ChoiceInstance(wire["n"], wire["k"], wire["l"], self.node(wire["h"], f"{at}/h"),
                                  self.node(wire["S"], f"{at}/S"), self.node(wire["domain"], f"{at}/domain"))
        raise InstanceParseError(f"Unknown node type {kind!r}", f"{at}/type")

    def _decode_x(self, wire: Dict[str, Any], at: str) -> XDescriptor:
        kind = XKind(wire["kind"])
        model = self.node(wire["model"], f"{at}/model")
        if kind is XKind.EXPLICIT:
            constraints = [ConditionModel.model_validate(c).value for c in wire["constraints"]]
            return ExplicitX(model, wire["k"], constraints)
        if kind is XKind.PRODUCT:
            return ProductX([self.node(p, f"{at}/parents/{i}") for i, p in enumerate(wire["parents"])], model)
        parent = self.node(wire["parent"], f"{at}/parent")
        if kind is XKind.IMAGE:
            return ImageX(parent, PolyMapModel.model_validate(wire["mapping"]).value, model)
        if kind is XKind.FILTERED:
            return FilteredX(parent, self.node(wire["predicate"], f"{at}/predicate"), model)
        if kind is XKind.APPENDED:
            return AppendedX(parent, PolyMapModel.model_validate(wire["mapping"]).value, wire["position"])
        if kind is XKind.WIDENED:
            return WidenedX(parent, wire["position"], wire["count"])
        return SubstitutedX(parent, wire["position"], wire["source"])

    def _decode_predicate(self, wire: Dict[str, Any], at: str) -> XPredicate:
        name = wire["name"]
        if name == ConditionFilter.name:
            return ConditionFilter([ConditionModel.model_validate(c).value for c in wire["conditions"]])
        if name == ZeroTestFilter.name:
            return ZeroTestFilter(ParamPolyModel.model_validate(wire["r"]).value, bool(wire["vanishing"]))
        if name == IsolatedFilter.name:
            return IsolatedFilter(self.node(wire["Z"], f"{at}/Z"))
        if name == CollidingPairFilter.name:
            return CollidingPairFilter(self.node(wire["Z"], f"{at}/Z"))
        if name == CoveredFilter.name:
            return CoveredFilter(self.node(wire["Z"], f"{at}/Z"), self.node(wire["inner_z"], f"{at}/inner_z"),
                                 self.node(wire["inner_x"], f"{at}/inner_x"))
        if name == RepresentativeFilter.name:
            return RepresentativeFilter(self.node(wire["Z"], f"{at}/Z"), wire.get("cap"))
        if name == ImageFilter.name:
            return ImageFilter(self.node(wire["h"], f"{at}/h"), self.node(wire["target"], f"{at}/target"))
        raise InstanceParseError(f"Unknown predicate {name!r}", f"{at}/name")


# -- traces --------------------------------------------------------------------------

def _measure_to_wire(measure) -> List[int]:
    k, alpha = measure
    return [k, *alpha.as_tuple()]


def _measure_from_wire(values: Sequence[int]):
    return (values[0], OrderIndex.from_tuple(tuple(values[1:])))


def trace_to_wire(trace: RecursionTrace) -> Dict[str, Any]:
    return {"initial": _measure_to_wire(trace.initial), "steps": [
        {"rule": s.rule, "before": _measure_to_wire(s.before), "after": _measure_to_wire(s.after), "depth": s.depth}
        for s in trace.steps
    ]}


class TraceStepModel(_Wire):
    rule: str
    before: List[NonNegativeInt] = Field(min_length=1)
    after: List[NonNegativeInt] = Field(min_length=1)
    depth: NonNegativeInt


class TraceModel(_Buildable):
    initial: List[NonNegativeInt] = Field(min_length=1)
    steps: List[TraceStepModel] = []

    def _build(self) -> RecursionTrace:
        steps = [TraceStep(s.rule, _measure_from_wire(s.before), _measure_from_wire(s.after), s.depth)
                 for s in self.steps]
        return RecursionTrace(_measure_from_wire(self.initial), steps)


Ref = Dict[Literal['$ref'], str]
ProvenanceTag = Literal[PROVENANCE_TAGS]


class UfssPieceWire(_Wire):
    Z: Ref
    S: Ref
    X: Ref
    injective: bool = True
    provenance: List[ProvenanceTag] = []


class ChoicePieceWire(_Wire):
    h: Ref
    X: Ref
    Y: Ref
    provenance: List[ProvenanceTag] = []


class UfssDecompositionWire(_Wire):
    kind: Literal['ufss_decomposition']
    defs: List[Dict[str, Any]] = []
    pieces: List[UfssPieceWire] = []
    traces: List[TraceModel] = []


class ChoiceDecompositionWire(_Wire):
    kind: Literal['choice_decomposition']
    defs: List[Dict[str, Any]] = []
    pieces: List[ChoicePieceWire] = []


DecompositionDocument = TypeAdapter(Annotated[
    Union[UfssDecompositionWire, ChoiceDecompositionWire],
    Field(discriminator='kind'),
])

Decomposition = Union[DecompositionResult, ChoiceDecomposition]


def decomposition_to_wire(dec: Decomposition) -> Dict[str, Any]:
    """Serialize a DecompositionResult or a ChoiceDecomposition."""
    encoder = _GraphEncoder()
    if isinstance(dec, DecompositionResult):
        pieces = [{"Z": encoder.ref(p.Z), "S": encoder.ref(p.S), "X": encoder.ref(p.X),
                   "injective": p.injective, "provenance": list(tags)}
                  for p, tags in zip(dec.pieces, dec.provenance)]
        return {"kind": "ufss_decomposition", "defs": encoder.defs, "pieces": pieces,
                "traces": [trace_to_wire(t) for t in dec.traces]}
    pieces = [{"h": encoder.ref(p.h), "X": encoder.ref(p.X), "Y": encoder.ref(p.Y), "provenance": list(tags)}
              for p, tags in zip(dec.pieces, dec.provenance)]
    return {"kind": "choice_decomposition", "defs": encoder.defs, "pieces": pieces}


def parse_decomposition_data(data: Any) -> Decomposition:
    try:
        document = DecompositionDocument.validate_python(data)
    except ValidationError as e:
        raise InstanceParseError(e.errors()[0]['msg'], _pointer(e, data)) from e
    decoder = _GraphDecoder(document.defs)
    if isinstance(document, UfssDecompositionWire):
        pieces = []
        for i, p in enumerate(document.pieces):
            at = f"/pieces/{i}"
            piece = UFSS(decoder.node(p.Z, f"{at}/Z"), decoder.node(p.S, f"{at}/S"), decoder.node(p.X, f"{at}/X"),
                         injective=p.injective)
            pieces.append(piece)
        return DecompositionResult(tuple(pieces), tuple(tuple(p.provenance) for p in document.pieces),
                                   tuple(t.value for t in document.traces))
    pieces = []
    for i, p in enumerate(document.pieces):
        at = f"/pieces/{i}"
        pieces.append(ChoicePiece(decoder.node(p.h, f"{at}/h"), decoder.node(p.X, f"{at}/X"),
                                  decoder.node(p.Y, f"{at}/Y")))
    return ChoiceDecomposition(tuple(pieces), tuple(tuple(p.provenance) for p in document.pieces))


def parse_decomposition(path: Path) -> Decomposition:
    decomposition = parse_decomposition_data(_load_json(path))
    logger.info(f"Parsed {type(decomposition).__name__} with {len(decomposition.pieces)} pieces from {path}")
    return decomposition


def write_json(path: Path, data: Any) -> None:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
