"""
Transforms on uniform families: restriction to a subfamily, reduction to a
single output coordinate and recombination by products, the k = 0 base
case, and the graph/parameter extensions used by the parameter descent.
"""
import itertools
import logging
from typing import Iterable, List, Optional, Sequence, Tuple

from algebraic_real import Scalar
from descriptors import DefSetDescriptor, Selection
from errors import ContractViolation, DimensionError, NormalFormError
from monomial_order import OrderIndex
from polynomials import Condition, ParamPoly, Poly, PolyMap, RatFunc, Relation, make_point
from small_sets import SmallSetModel
from ufss_core import UFSS, DecompositionResult
from x_descriptors import (
    AppendedX, CoveredFilter, ExplicitX, FilteredX, ImageX, ProductX, SubstitutedX, WidenedX,
)

logger = logging.getLogger(__name__)


def _relayout(Z: DefSetDescriptor, m: int, b_pos: Sequence[int], insert_at: int = 0,
              inserted: int = 0) -> DefSetDescriptor:
    """
    Move Z into a layout with ``m`` b-coordinates and ``inserted`` new
    parameters placed before parameter ``insert_at``.

    b-coordinate j goes to position b_pos[j]; the new coordinates are free.
    """
    k = Z.k + inserted
    a_pos = [t if t < insert_at else t + inserted for t in range(Z.k)]
    full = list(b_pos) + [m + t for t in a_pos]
    outputs = [m + k + i for i in range(Z.l)]
    equations = tuple(p.remap_x(b_pos, m).insert_params(insert_at, inserted) if inserted
                      else p.remap_x(b_pos, m) for p in Z.equations)
    return Z.with_changes(
        m=m, k=k,
        equations=equations,
        strict=tuple(q.remap(full + outputs, m + k + Z.l) for q in Z.strict),
        side_equations=tuple(q.remap(full + outputs, m + k + Z.l) for q in Z.side_equations),
        ambient=tuple(c.remap(full, m + k) for c in Z.ambient),
        guards=tuple(g.remap(b_pos, m) for g in Z.guards),
    )


# -- selector split ---------------------------------------------------------------

def split_by_selection(u: UFSS) -> Tuple[UFSS, ...]:
    """One family per fiber selector; every returned family has singleton fibers."""
    if u.Z.has_singleton_fibers():
        return (u,)
    q = u.Z.fiber_bound()
    return tuple(u.with_changes(Z=u.Z.with_changes(selection=Selection(j, q))) for j in range(1, q + 1))


# -- restriction -------------------------------------------------------------------

def check_containment(inner: UFSS, outer: DecompositionResult,
                      samples: Iterable[Sequence[Scalar]]) -> None:
    """Raise ContractViolation at the first sample where inner escapes outer."""
    for a in samples:
        a = make_point(a)
        covered = set(outer.union_at(a))
        for c in inner.union_at(a):
            if c not in covered:
                raise ContractViolation(
                    "Inner family is not contained in the outer decomposition",
                    {"a": [str(v) for v in a], "c": [str(v) for v in c]},
                )


def restrict_sub(inner: UFSS, outer: DecompositionResult,
                 samples: Optional[Iterable[Sequence[Scalar]]] = None) -> DecompositionResult:
    """
    Decompose ``inner`` from a decomposition of a family containing it.

    Each outer piece is split into singleton-fiber pieces and its X is
    filtered down to the members whose fiber lies in some inner fiber.

    Args:
        inner: the family to decompose
        outer: injective pieces whose union contains inner's union at every a
        samples: parameters at which containment is checked first

    Returns:
        Injective pieces whose union equals inner's union
    """
    if samples is not None:
        check_containment(inner, outer, samples)
    pieces: List[UFSS] = []
    provenance: List[Tuple[str, ...]] = []
    for index, (piece, tags) in enumerate(zip(outer.pieces, outer.provenance)):
        if not piece.injective:
            raise ContractViolation(f"Outer piece {index} is not injective", {"piece": index})
        if (piece.k, piece.l) != (inner.k, inner.l):
            raise DimensionError(f"Outer piece ({piece.k}, {piece.l}) against inner ({inner.k}, {inner.l})")
        for part in split_by_selection(piece):
            X = FilteredX(part.X, CoveredFilter(part.Z, inner.Z, inner.X))
            pieces.append(UFSS(part.Z, part.S, X, injective=True))
            provenance.append(('L35-RESTRICT',) + tags)
    logger.debug(f"Restricted {len(outer.pieces)} outer pieces into {len(pieces)}")
    return DecompositionResult(tuple(pieces), tuple(provenance), outer.traces)


def relax_conditions(u: UFSS) -> UFSS:
    """The enveloping family without strict inequalities, side equations or selections."""
    return u.with_changes(Z=u.Z.with_changes(
        strict=(), side_equations=(), selection=None, coordinate_selections=()
    ), injective=False)


# -- several output coordinates --------------------------------------------------------

def _coordinate_family(u: UFSS, i: int) -> UFSS:
    Z = u.Z
    width = Z.m + Z.k
    own = set(range(width)) | {width + i}
    mapping = [v if v < width else width for v in range(width + Z.l)]

    def keep(q: Poly) -> bool:
        return q.variables() <= own

    coordinate = DefSetDescriptor(
        m=Z.m, k=Z.k, l=1,
        equations=(Z.equations[i],),
        strict=tuple(q.remap(mapping, width + 1) for q in Z.strict if keep(q)),
        side_equations=tuple(q.remap(mapping, width + 1) for q in Z.side_equations if keep(q)),
        ambient=Z.ambient,
        guards=Z.guards,
        nondegenerate=Z.nondegenerate,
        coordinate_selections=(Z.coordinate_selections[i],),
    )
    return UFSS(coordinate, u.S, u.X)


def reduce_l_to_1(u: UFSS) -> Tuple[UFSS, ...]:
    """
    Per-coordinate families whose fiber product contains Z's fibers.

    Coordinate i keeps its own equation and every condition that mentions
    no other output coordinate.
    """
    if u.l < 2:
        raise NormalFormError(f"reduce_l_to_1 expects l > 1, got l={u.l}")
    families = tuple(_coordinate_family(u, i) for i in range(u.l))
    logger.info(f"Reduced l={u.l} family to {len(families)} single-coordinate families")
    return families


def _product_piece(factors: Sequence[UFSS]) -> UFSS:
    l = len(factors)
    k = factors[0].k
    m = sum(f.m for f in factors)
    equations, strict, side, ambient, guards, selections = [], [], [], [], [], []
    offset = 0
    for i, factor in enumerate(factors):
        Z = factor.Z
        if Z.selection is not None and (Z.strict or Z.side_equations):
            raise NormalFormError("Product factor combines a selection with strict conditions")
        b_pos = [offset + j for j in range(Z.m)]
        a_pos = [m + t for t in range(k)]
        equations.append(Z.equations[0].remap_x(b_pos, m))
        mapping = b_pos + a_pos + [m + k + i]
        strict.extend(q.remap(mapping, m + k + l) for q in Z.strict)
        side.extend(q.remap(mapping, m + k + l) for q in Z.side_equations)
        ambient.extend(c.remap(b_pos + a_pos, m + k) for c in Z.ambient)
        guards.extend(g.remap(b_pos, m) for g in Z.guards)
        selections.append(Z.coordinate_selections[0] or Z.selection)
        offset += Z.m
    Z = DefSetDescriptor(
        m=m, k=k, l=l,
        equations=tuple(equations),
        strict=tuple(strict),
        side_equations=tuple(side),
        ambient=tuple(ambient),
        guards=tuple(guards),
        nondegenerate=any(f.Z.nondegenerate for f in factors),
        coordinate_selections=tuple(selections),
    )
    S = SmallSetModel.product([f.S for f in factors])
    X = ProductX([f.X for f in factors], model=S)
    return UFSS(Z, S, X, injective=all(f.injective for f in factors))


def recombine_products(original: UFSS, per_coordinate: Sequence[DecompositionResult],
                       samples: Optional[Iterable[Sequence[Scalar]]] = None) -> DecompositionResult:
    """
    Products of per-coordinate pieces, one per choice of a piece for each
    coordinate, restricted back to ``original``.
    """
    if len(per_coordinate) != original.l:
        raise DimensionError(f"Expected {original.l} per-coordinate results, got {len(per_coordinate)}")
    pieces, provenance = [], []
    for choice in itertools.product(*(range(len(r.pieces)) for r in per_coordinate)):
        factors = [per_coordinate[i].pieces[j] for i, j in enumerate(choice)]
        pieces.append(_product_piece(factors))
        provenance.append(('L36-PRODUCT',))
    traces = [t for r in per_coordinate for t in r.traces]
    envelope = DecompositionResult(tuple(pieces), tuple(provenance), tuple(traces))
    logger.info(f"Recombined {len(pieces)} product pieces for l={original.l}")
    return restrict_sub(original, envelope, samples)


# -- k = 0 -------------------------------------------------------------------------

def dedupe_k0(u: UFSS) -> DecompositionResult:
    """
    Keep the lexicographically least member of each class of equal fibers.

    Fibers are first split by selector, so distinct classes have disjoint
    fibers.
    """
    if u.k != 0:
        raise DimensionError(f"dedupe_k0 needs k=0, got k={u.k}")
    pieces = []
    for part in split_by_selection(u):
        classes = {}
        for b in part.X.x_fiber(()):
            fiber = frozenset(part.Z.fiber(b, ()))
            if fiber:
                classes.setdefault(fiber, []).append(b)
        representatives = sorted(min(group) for group in classes.values())
        S = SmallSetModel.subset_of_points(part.S, representatives)
        pieces.append(UFSS(part.Z, S, ExplicitX(S, 0), injective=True))
    logger.debug(f"dedupe_k0: {len(pieces)} pieces over {len(u.S)} points")
    return DecompositionResult(tuple(pieces), (('L37-DEDUP',),) * len(pieces))


# -- extensions ----------------------------------------------------------------------

def push_graph(u: UFSS, f: PolyMap) -> UFSS:
    """Replace each b by (b, f(b)) in Z, S and X; fibers are unchanged."""
    if f.n_in != u.m:
        raise DimensionError(f"Map on {f.n_in} coordinates for a family with m={u.m}")
    graph = PolyMap.graph(f)
    m = graph.n_out
    Z = _relayout(u.Z, m, list(range(u.m)))
    S = SmallSetModel.image(u.S, graph)
    X = ImageX(u.X, graph, model=S)
    return UFSS(Z, S, X, injective=u.injective)


def _graph_conditions(f: PolyMap, m: int, k: int, position: int) -> List[Condition]:
    n = f.n_out
    a_pos = [t if t < position else t + n for t in range(k)]
    mapping = list(range(m)) + [m + p for p in a_pos]
    width = m + k + n
    conditions = []
    for j, component in enumerate(f.components):
        numer = component.numer.remap(mapping, width)
        denom = component.denom.remap(mapping, width)
        conditions.append(Condition(numer - Poly.variable(m + position + j, width) * denom, Relation.EQ))
        if not denom.is_constant():
            conditions.append(Condition(denom, Relation.NE))
    return conditions


def append_param(u: UFSS, f: PolyMap, position: Optional[int] = None) -> UFSS:
    """
    Add parameters e = f(b, a) at ``position`` (default: after a).

    The new family has fiber Z_{b,a} at (b, a, e) when e = f(b, a) and is
    empty elsewhere; m and l are unchanged.
    """
    if f.n_in != u.m + u.k:
        raise DimensionError(f"Map on {f.n_in} coordinates, expected m+k={u.m + u.k}")
    position = u.k if position is None else position
    Z = _relayout(u.Z, u.m, list(range(u.m)), position, f.n_out)
    Z = Z.with_changes(ambient=Z.ambient + tuple(_graph_conditions(f, u.m, u.k, position)))
    X = AppendedX(u.X, f, position)
    return UFSS(Z, u.S, X, injective=u.injective)


def insert_free_param(u: UFSS, position: int, count: int = 1) -> UFSS:
    """Add parameters the family ignores."""
    Z = _relayout(u.Z, u.m, list(range(u.m)), position, count)
    return UFSS(Z, u.S, WidenedX(u.X, position, count), injective=u.injective)


def substitute_param(u: UFSS, position: int, source: int) -> UFSS:
    """
    Replace parameter ``position`` by the b-coordinate ``source``.

    The result has k - 1 parameters and fiber Z_{b, a'} = Z_{b, a} where a
    is a' with b[source] inserted at ``position``.
    """
    if not 0 <= position < u.k or not 0 <= source < u.m:
        raise DimensionError(f"Cannot substitute a{position} by b{source} in ({u.m}, {u.k})")
    Z = u.Z
    m, k = Z.m, Z.k
    replacement = ParamPoly.monomial(OrderIndex.zero(k), RatFunc.variable(source, m))
    variable = m + position

    def substitute(q: Poly) -> Poly:
        return q.substitute(variable, Poly.variable(source, q.nvars)).drop_var(variable)

    reduced = Z.with_changes(
        k=k - 1,
        equations=tuple(p.substitute_param(position, replacement) for p in Z.equations),
        strict=tuple(substitute(q) for q in Z.strict),
        side_equations=tuple(substitute(q) for q in Z.side_equations),
        ambient=tuple(Condition(substitute(c.poly), c.relation) for c in Z.ambient),
    )
    return UFSS(reduced, u.S, SubstitutedX(u.X, position, source), injective=u.injective)
