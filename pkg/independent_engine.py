"""
Choice decomposition over a supplied cell decomposition.

On an open, strongly regular cell the map is made injective by keeping the
lexicographically least point of S in each collision class. A cell that
is the graph of a section over one coordinate is projected away from that
coordinate, decomposed one dimension lower, and lifted back.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from config import config
from descriptors import DefSetDescriptor
from errors import ContractViolation, DimensionError, NormalFormError
from monomial_order import OrderIndex
from polynomials import ParamPoly, PolyMap
from small_sets import SmallSetModel
from ufss_core import (ChoiceDecomposition, ChoiceInstance, ChoicePiece, MapDescriptor, MapPiece,
                       choice_to_ufss)
from x_descriptors import FilteredX, ImageFilter, RepresentativeFilter, WidenedX

logger = logging.getLogger(__name__)

Tagged = Tuple[ChoicePiece, Tuple[str, ...]]


class Regularity(str, Enum):
    CONSTANT = 'CONSTANT'
    STRICT_INC = 'STRICT_INC'
    STRICT_DEC = 'STRICT_DEC'


@dataclass(frozen=True, eq=False)
class RegularCellDescriptor:
    """
    One cell C of the decomposition of the domain, as a region over (x, y).

    A cell with ``missing_coordinate`` set is the graph of ``section`` over
    ``reduced``, the projection of C forgetting that coordinate. Coordinates
    0..n-1 are the x block, n..n+k-1 the y block.

    Attributes:
        cell: region of layout (n, k, 0)
        regular: cell convex in each coordinate
        strongly_regular: regular in every coordinate order
        h_regularity: per-coordinate monotonicity of the map on the cell
        missing_coordinate: coordinate the cell is a graph in, or None when open
        section: z-free polynomial over (n, k) not involving that coordinate
        reduced: the projected cell
    """

    cell: DefSetDescriptor
    regular: bool = True
    strongly_regular: bool = True
    h_regularity: Tuple[Regularity, ...] = ()
    missing_coordinate: Optional[int] = None
    section: Optional[ParamPoly] = None
    reduced: Optional["RegularCellDescriptor"] = None

    def __post_init__(self):
        object.__setattr__(self, 'h_regularity', tuple(Regularity(t) for t in self.h_regularity))
        if self.cell.l != 0:
            raise DimensionError("A cell is a region with l = 0")
        if self.strongly_regular and not self.regular:
            raise ContractViolation("Strongly regular cell must be regular", {"cell": repr(self.cell)})
        if self.missing_coordinate is not None:
            if self.section is None or self.reduced is None:
                raise NormalFormError("A graph cell needs its section and its projected cell")
            if not 0 <= self.missing_coordinate < self.n + self.k:
                raise DimensionError(f"Coordinate {self.missing_coordinate} outside 0..{self.n + self.k - 1}")

    @property
    def n(self) -> int:
        return self.cell.m

    @property
    def k(self) -> int:
        return self.cell.k

    @property
    def is_open(self) -> bool:
        return self.missing_coordinate is None


def _single_piece(h: MapDescriptor) -> MapPiece:
    if len(h.pieces) != 1:
        raise NormalFormError(f"decompose_independent needs a single-piece map, got {len(h.pieces)}")
    return h.pieces[0]


def _on_cell(h: MapDescriptor, cell: RegularCellDescriptor) -> MapDescriptor:
    """h restricted to the cell; the piece domain keeps h's own conditions."""
    piece = _single_piece(h)
    domain = DefSetDescriptor.region(
        h.n, h.k,
        ambient=cell.cell.ambient + piece.domain.ambient,
        guards=cell.cell.guards + piece.domain.guards,
    )
    return MapDescriptor(h.n, h.k, h.l, [MapPiece(domain, piece.components)])


def _check_regular(cell: RegularCellDescriptor) -> None:
    width = cell.n + cell.k
    if not (cell.regular and cell.strongly_regular) or len(cell.h_regularity) != width:
        raise ContractViolation(
            "Open cell must be strongly regular with the map regular in every coordinate",
            {
                "regular": cell.regular,
                "strongly_regular": cell.strongly_regular,
                "h_regularity": [t.value for t in cell.h_regularity],
                "expected_tags": width,
            },
        )


def _open_cell(cell: RegularCellDescriptor, h: MapDescriptor, S: SmallSetModel) -> List[Tagged]:
    _check_regular(cell)
    h_cell = _on_cell(h, cell)
    graph = choice_to_ufss(ChoiceInstance(h.n, h.k, h.l, h_cell, S, cell.cell))
    X = FilteredX(graph.X, RepresentativeFilter(graph.Z, cap=config.engine.max_collision_class))
    return [(ChoicePiece(h_cell, X, S), ('LEXMIN',))]


def _parameter_section(cell: RegularCellDescriptor, h: MapDescriptor, S: SmallSetModel) -> List[Tagged]:
    s = cell.missing_coordinate - cell.n
    piece = _single_piece(_on_cell(h, cell))
    reduced_h = MapDescriptor(h.n, h.k - 1, h.l, [MapPiece(
        DefSetDescriptor.region(h.n, h.k - 1),
        tuple(c.substitute_param(s, cell.section) for c in piece.components),
    )])
    inner = _decompose_cell(cell.reduced, reduced_h, S)
    target = ChoiceInstance(h.n, h.k, h.l, _on_cell(h, cell), S, cell.cell)
    lifted = []
    for reduced_piece, tags in inner:
        h_t = reduced_piece.h.insert_params(s)
        X = FilteredX(WidenedX(reduced_piece.X, s), ImageFilter(h_t, target))
        lifted.append((ChoicePiece(h_t, X, reduced_piece.Y), ('L35-RESTRICT',) + tags))
    return lifted


def _x_section(cell: RegularCellDescriptor, h: MapDescriptor, S: SmallSetModel) -> List[Tagged]:
    i = cell.missing_coordinate
    if cell.section.y_variables() or cell.section.z_degree > 0:
        raise NormalFormError(
            f"Section over x{i} depends on the parameters; the projected small set cannot be formed"
        )
    value = cell.section.coeff(OrderIndex.zero(cell.k))
    if i in value.variables():
        raise NormalFormError(f"Section over x{i} involves x{i} itself")
    keep = [j for j in range(cell.n) if j != i]
    mapping = [j if j < i else j - 1 for j in range(cell.n)]
    mapping[i] = 0

    def on_graph(g):
        return not value.denom.evaluate(g).is_zero() and (value.evaluate(g) - g[i]).is_zero()

    reduced_S = SmallSetModel.image(SmallSetModel.subset(S, on_graph), PolyMap.projection(keep, cell.n))
    piece = _single_piece(_on_cell(h, cell))
    reduced_h = MapDescriptor(h.n - 1, h.k, h.l, [MapPiece(
        DefSetDescriptor.region(h.n - 1, h.k),
        tuple(c.substitute_x(i, value).remap_x(mapping, h.n - 1) for c in piece.components),
    )])
    inner = _decompose_cell(cell.reduced, reduced_h, reduced_S)
    target = ChoiceInstance(h.n, h.k, h.l, _on_cell(h, cell), S, cell.cell)
    return [
        (ChoicePiece(p.h, FilteredX(p.X, ImageFilter(p.h, target)), p.Y), ('L35-RESTRICT',) + tags)
        for p, tags in inner
    ]


def _decompose_cell(cell: RegularCellDescriptor, h: MapDescriptor, S: SmallSetModel) -> List[Tagged]:
    if (cell.n, cell.k) != (h.n, h.k):
        raise DimensionError(f"Cell over ({cell.n},{cell.k}) for a map over ({h.n},{h.k})")
    if cell.is_open:
        return _open_cell(cell, h, S)
    logger.debug(f"Projecting coordinate {cell.missing_coordinate} of a ({cell.n},{cell.k}) cell")
    if cell.missing_coordinate >= cell.n:
        return _parameter_section(cell, h, S)
    return _x_section(cell, h, S)


def decompose_independent(cells: Sequence[RegularCellDescriptor], h: MapDescriptor,
                          S: SmallSetModel) -> ChoiceDecomposition:
    """
    Decompose h restricted to S x M^k, one cell at a time.

    Args:
        cells: cells covering the domain of h
        h: single-piece map over (n, k)
        S: small set of arity n

    Returns:
        ChoiceDecomposition with one LEXMIN piece per open cell reached
    """
    if S.m != h.n:
        raise DimensionError(f"Small set of arity {S.m} for a map on {h.n} coordinates")
    _single_piece(h)
    pieces: List[ChoicePiece] = []
    provenance: List[Tuple[str, ...]] = []
    for cell in cells:
        for piece, tags in _decompose_cell(cell, h, S):
            pieces.append(piece)
            provenance.append(tags)
    logger.info(f"decompose_independent: {len(cells)} cells -> {len(pieces)} pieces")
    return ChoiceDecomposition(tuple(pieces), tuple(provenance))
