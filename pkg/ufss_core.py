"""
Uniform families of small sets and choice-property instances.

A UFSS is a triple (Z, S, X): Z a normal-form descriptor with finite
fibers, S a small-set model and X a parameter-indexed family inside S.
This module also holds the map descriptors of choice instances, the
fiber selectors that turn injective families into injective maps, and the
result types the engines return.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from algebraic_real import Scalar
from descriptors import DefSetDescriptor, Selection
from errors import ContractViolation, DimensionError
from monomial_order import OrderIndex
from polynomials import Condition, ParamPoly, Point, Poly, RatFunc, make_point
from small_sets import SmallSetModel
from x_descriptors import ExplicitX, XDescriptor

logger = logging.getLogger(__name__)

FALLBACK_TAG = 'V2-FALLBACK'
PROVENANCE_TAGS = (
    'LINEAR', 'LEXMIN', 'L36-PRODUCT', 'L35-RESTRICT', 'L37-DEDUP', 'L39-GRAPH',
    'L310-PARAM', 'V1-DESCENT', 'V2-SUBST', FALLBACK_TAG, 'X1-INJECTIVE',
)


@dataclass(frozen=True, eq=False)
class UFSS:
    """A family (Z, S, X); ``injective`` marks pairwise disjoint fibers."""

    Z: DefSetDescriptor
    S: SmallSetModel
    X: XDescriptor
    injective: bool = False

    def __post_init__(self):
        if not (self.Z.m == self.S.m == self.X.m):
            raise DimensionError(f"Arities differ: Z.m={self.Z.m}, S.m={self.S.m}, X.m={self.X.m}")
        if self.Z.k != self.X.k:
            raise DimensionError(f"Parameter arities differ: Z.k={self.Z.k}, X.k={self.X.k}")

    @property
    def m(self) -> int:
        return self.Z.m

    @property
    def k(self) -> int:
        return self.Z.k

    @property
    def l(self) -> int:
        return self.Z.l

    def members(self, a: Sequence[Scalar]) -> Tuple[Point, ...]:
        return self.X.x_fiber(a)

    def union_at(self, a: Sequence[Scalar]) -> Tuple[Point, ...]:
        """Union of Z_{b,a} over b in X_a, sorted."""
        a = make_point(a)
        points = set()
        for b in self.X.x_fiber(a):
            points.update(self.Z.fiber(b, a))
        return tuple(sorted(points))

    def mark_injective(self) -> "UFSS":
        return replace(self, injective=True)

    def with_changes(self, **changes) -> "UFSS":
        return replace(self, **changes)

    def __repr__(self) -> str:
        flag = ", injective" if self.injective else ""
        return f"UFSS(m={self.m}, k={self.k}, l={self.l}, |S|={len(self.S)}{flag})"


# -- maps --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MapPiece:
    """Components (z-free ParamPolys over (x; y)) valid on ``domain``."""

    domain: DefSetDescriptor
    components: Tuple[ParamPoly, ...]

    def __post_init__(self):
        object.__setattr__(self, 'components', tuple(self.components))
        for c in self.components:
            if c.z_degree > 0 or (c.n, c.k) != (self.domain.m, self.domain.k):
                raise DimensionError(f"Map component {c} does not fit a ({self.domain.m},{self.domain.k}) domain")

    def denominators(self) -> Tuple[RatFunc, ...]:
        """Non-constant denominators of the components, as guards over x."""
        found = []
        for comp in self.components:
            for coeff in comp.coeffs.values():
                if not coeff.denom.is_constant() and RatFunc(coeff.denom) not in found:
                    found.append(RatFunc(coeff.denom))
        return tuple(found)

    def evaluate(self, b: Point, a: Point) -> Point:
        return tuple(c.z_coefficients(b, a)[0] for c in self.components)


class MapDescriptor:
    """A piecewise map from a subset of M^(n+k) to M^l; pieces have disjoint domains."""

    def __init__(self, n: int, k: int, l: int, pieces: Sequence[MapPiece]):
        self.n = n
        self.k = k
        self.l = l
        self.pieces = tuple(pieces)
        for piece in self.pieces:
            if len(piece.components) != l or (piece.domain.m, piece.domain.k) != (n, k):
                raise DimensionError(f"Map piece does not match layout ({n}, {k}) -> {l}")

    @classmethod
    def from_polys(cls, n: int, k: int, polys: Sequence[Poly],
                   domain: Optional[DefSetDescriptor] = None) -> "MapDescriptor":
        """Single-piece map whose components are polynomials over (x, y)."""
        domain = domain or DefSetDescriptor.region(n, k)
        components = [ParamPoly.from_poly(p.insert_vars(n + k), n, k) for p in polys]
        return cls(n, k, len(polys), [MapPiece(domain, tuple(components))])

    def insert_params(self, position: int, count: int = 1) -> "MapDescriptor":
        """The same map with ``count`` ignored parameters before a_position."""
        k = self.k + count
        mapping = list(range(self.n)) + [self.n + (t if t < position else t + count) for t in range(self.k)]
        pieces = []
        for piece in self.pieces:
            domain = DefSetDescriptor.region(
                self.n, k,
                ambient=tuple(c.remap(mapping, self.n + k) for c in piece.domain.ambient),
                guards=piece.domain.guards,
            )
            pieces.append(MapPiece(domain, tuple(c.insert_params(position, count) for c in piece.components)))
        return MapDescriptor(self.n, k, self.l, pieces)

    def evaluate(self, b: Sequence[Scalar], a: Sequence[Scalar]) -> Optional[Point]:
        """h(b, a), or None outside every piece's domain."""
        b, a = make_point(b), make_point(a)
        for piece in self.pieces:
            if piece.domain.admits(b, a) and all(
                    not g.evaluate(b).is_zero() for g in piece.denominators()):
                return piece.evaluate(b, a)
        return None

    def __repr__(self) -> str:
        return f"MapDescriptor(({self.n},{self.k}) -> {self.l}, {len(self.pieces)} pieces)"


@dataclass(frozen=True, eq=False)
class ChoiceInstance:
    """h defined on Z inside M^(n+k), restricted to S x M^k."""

    n: int
    k: int
    l: int
    h: MapDescriptor
    S: SmallSetModel
    domain: DefSetDescriptor
    cells: tuple = ()

    def __post_init__(self):
        if (self.h.n, self.h.k, self.h.l) != (self.n, self.k, self.l):
            raise DimensionError("Map layout does not match the instance")
        if self.S.m != self.n or (self.domain.m, self.domain.k) != (self.n, self.k):
            raise DimensionError("Small set or domain does not match the instance")

    def image_at(self, a: Sequence[Scalar]) -> Tuple[Point, ...]:
        """h(S cap Z_a, a), sorted."""
        a = make_point(a)
        values = set()
        for g in self.S.points:
            if self.domain.admits(g, a):
                value = self.h.evaluate(g, a)
                if value is not None:
                    values.add(value)
        return tuple(sorted(values))


@dataclass(frozen=True)
class RootSelector:
    """(b, a) -> the j-th of q ordered fiber elements, smallest repeated."""

    Z: DefSetDescriptor
    j: int
    q: int

    @property
    def l(self) -> int:
        return self.Z.l

    def evaluate(self, b: Sequence[Scalar], a: Sequence[Scalar]) -> Optional[Point]:
        picked = Selection(self.j, self.q).pick(self.Z.fiber(b, a))
        return picked[0] if picked else None


@dataclass(frozen=True)
class FiberSelection:
    """The q selectors f_1..f_q of a family with fibers of size at most q."""

    Z: DefSetDescriptor
    q: int

    @property
    def selectors(self) -> Tuple[RootSelector, ...]:
        return tuple(RootSelector(self.Z, j, self.q) for j in range(1, self.q + 1))

    def values(self, b: Sequence[Scalar], a: Sequence[Scalar]) -> Tuple[Point, ...]:
        return tuple(v for v in (f.evaluate(b, a) for f in self.selectors) if v is not None)


@dataclass(frozen=True, eq=False)
class ChoicePiece:
    """One (h_i, X_i, Y_i) triple; h_i is a MapDescriptor or a RootSelector."""

    h: object
    X: XDescriptor
    Y: SmallSetModel

    def image_at(self, a: Sequence[Scalar]) -> Tuple[Point, ...]:
        a = make_point(a)
        values = set()
        for t in self.X.x_fiber(a):
            value = self.h.evaluate(t, a)
            if value is not None:
                values.add(value)
        return tuple(sorted(values))


@dataclass(frozen=True, eq=False)
class ChoiceDecomposition:
    pieces: Tuple[ChoicePiece, ...]
    provenance: Tuple[Tuple[str, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'pieces', tuple(self.pieces))
        if not self.provenance:
            object.__setattr__(self, 'provenance', ((),) * len(self.pieces))

    def union_at(self, a: Sequence[Scalar]) -> Tuple[Point, ...]:
        values = set()
        for piece in self.pieces:
            values.update(piece.image_at(a))
        return tuple(sorted(values))


# -- recursion trace and results -----------------------------------------------

Measure = Tuple[int, OrderIndex]


@dataclass(frozen=True)
class TraceStep:
    rule: str
    before: Measure
    after: Measure
    depth: int


@dataclass
class RecursionTrace:
    """Parent-to-child steps of one rcf decomposition."""

    initial: Measure
    steps: List[TraceStep] = field(default_factory=list)

    def record(self, rule: str, before: Measure, after: Measure, depth: int) -> None:
        logger.debug(f"{rule}: (k={before[0]}, {before[1]}) -> (k={after[0]}, {after[1]}) at depth {depth}")
        self.steps.append(TraceStep(rule, before, after, depth))

    @property
    def max_depth(self) -> int:
        return max((s.depth for s in self.steps), default=0)


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    """Injective pieces, one provenance tag tuple per piece, recursion traces."""

    pieces: Tuple[UFSS, ...] = ()
    provenance: Tuple[Tuple[str, ...], ...] = ()
    traces: Tuple[RecursionTrace, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'pieces', tuple(self.pieces))
        object.__setattr__(self, 'traces', tuple(self.traces))
        provenance = tuple(tuple(p) for p in self.provenance) or ((),) * len(self.pieces)
        if len(provenance) != len(self.pieces):
            raise DimensionError("One provenance entry per piece is required")
        object.__setattr__(self, 'provenance', provenance)

    @classmethod
    def single(cls, piece: UFSS, *tags: str) -> "DecompositionResult":
        return cls((piece,), (tuple(tags),))

    @classmethod
    def combine(cls, results: Iterable["DecompositionResult"]) -> "DecompositionResult":
        pieces, provenance, traces = [], [], []
        for result in results:
            pieces.extend(result.pieces)
            provenance.extend(result.provenance)
            traces.extend(result.traces)
        return cls(tuple(pieces), tuple(provenance), tuple(traces))

    def tagged(self, tag: str) -> "DecompositionResult":
        """Prepend ``tag`` to every piece's provenance."""
        provenance = tuple(p if p[:1] == (tag,) else (tag,) + p for p in self.provenance)
        return DecompositionResult(self.pieces, provenance, self.traces)

    def with_traces(self, traces: Sequence[RecursionTrace]) -> "DecompositionResult":
        return DecompositionResult(self.pieces, self.provenance, tuple(self.traces) + tuple(traces))

    @property
    def fallback_pieces(self) -> Tuple[UFSS, ...]:
        return tuple(p for p, tags in zip(self.pieces, self.provenance) if FALLBACK_TAG in tags)

    def union_at(self, a: Sequence[Scalar]) -> Tuple[Point, ...]:
        points = set()
        for piece in self.pieces:
            points.update(piece.union_at(a))
        return tuple(sorted(points))

    def tag_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for tags in self.provenance:
            for tag in tags:
                counts[tag] = counts.get(tag, 0) + 1
        return counts

    def __len__(self) -> int:
        return len(self.pieces)


# -- conversions -------------------------------------------------------------------

def _z_minus(component: ParamPoly) -> ParamPoly:
    z = ParamPoly.monomial(OrderIndex((0,) * component.k, 1), RatFunc.constant(1, component.n))
    return z - component


def _graph_piece(inst: ChoiceInstance, piece: MapPiece) -> UFSS:
    conditions: Tuple[Condition, ...] = inst.domain.membership_conditions() + piece.domain.membership_conditions()
    guards = piece.denominators()
    Z = DefSetDescriptor(
        m=inst.n, k=inst.k, l=inst.l,
        equations=tuple(_z_minus(c) for c in piece.components),
        ambient=conditions,
        guards=guards,
        nondegenerate=True,
    )
    X = ExplicitX(inst.S, inst.k, Z.membership_conditions())
    return UFSS(Z, inst.S, X)


def choice_to_ufss_pieces(inst: ChoiceInstance) -> Tuple[UFSS, ...]:
    """One graph family per domain piece of h."""
    return tuple(_graph_piece(inst, piece) for piece in inst.h.pieces)


def choice_to_ufss(inst: ChoiceInstance) -> UFSS:
    """
    The graph family W = {(g, a, h(g, a))} with X = Z cap (S x M^k).

    Args:
        inst: choice instance whose map has a single piece

    Returns:
        UFSS whose union at a equals h(S cap Z_a, a)
    """
    if len(inst.h.pieces) != 1:
        raise ContractViolation(
            f"choice_to_ufss needs a single-piece map, got {len(inst.h.pieces)}; use choice_to_ufss_pieces",
            {"pieces": len(inst.h.pieces)},
        )
    return _graph_piece(inst, inst.h.pieces[0])


def ufss_to_choice(dec: DecompositionResult) -> ChoiceDecomposition:
    """
    Turn injective families into injective maps.

    Graph families become their graph map; any other family is split into
    its fiber selectors f_1..f_q.
    """
    pieces: List[ChoicePiece] = []
    provenance: List[Tuple[str, ...]] = []
    for index, (piece, tags) in enumerate(zip(dec.pieces, dec.provenance)):
        if not piece.injective:
            raise ContractViolation(f"Piece {index} is not marked injective", {"piece": index})
        graph = piece.Z.graph_components()
        if graph is not None:
            domain = DefSetDescriptor.region(piece.m, piece.k, piece.Z.ambient, piece.Z.guards)
            h = MapDescriptor(piece.m, piece.k, piece.l, [MapPiece(domain, graph)])
            pieces.append(ChoicePiece(h, piece.X, piece.S))
            provenance.append(tags)
            continue
        selection = FiberSelection(piece.Z, piece.Z.fiber_bound())
        for selector in selection.selectors:
            pieces.append(ChoicePiece(selector, piece.X, piece.S))
            provenance.append(tags)
    logger.info(f"Converted {len(dec.pieces)} families into {len(pieces)} choice pieces")
    return ChoiceDecomposition(tuple(pieces), tuple(provenance))
