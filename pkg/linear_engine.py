"""
Choice decomposition for affine maps h(g, a) = (r_j . g + s_j . a + b_j)_j.

The g-dependence factors through the linear map g -> (r_j . g)_j, so one
piece suffices: Y is the image of S under that map and h0 translates it.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from algebraic_real import Scalar
from descriptors import DefSetDescriptor
from errors import DimensionError
from polynomials import Point, Poly, PolyMap, RatFunc, make_point
from small_sets import SmallSetModel
from ufss_core import ChoiceDecomposition, ChoiceInstance, ChoicePiece, MapDescriptor
from x_descriptors import ExplicitX, ImageX

logger = logging.getLogger(__name__)

Vector = Tuple[Fraction, ...]


@dataclass(frozen=True, eq=False)
class AffineMapDescriptor:
    """Rows r_j (over g), s_j (over a) and constants b_j, on ``domain``."""

    n: int
    k: int
    l: int
    r: Tuple[Vector, ...]
    s: Tuple[Vector, ...]
    b: Vector
    domain: Optional[DefSetDescriptor] = None

    def __post_init__(self):
        object.__setattr__(self, 'r', tuple(tuple(Fraction(v) for v in row) for row in self.r))
        object.__setattr__(self, 's', tuple(tuple(Fraction(v) for v in row) for row in self.s))
        object.__setattr__(self, 'b', tuple(Fraction(v) for v in self.b))
        if self.domain is None:
            object.__setattr__(self, 'domain', DefSetDescriptor.region(self.n, self.k))
        if len(self.r) != self.l or len(self.s) != self.l or len(self.b) != self.l:
            raise DimensionError(f"Affine map needs {self.l} rows of r, s and b")
        if any(len(row) != self.n for row in self.r) or any(len(row) != self.k for row in self.s):
            raise DimensionError(f"Affine rows must have lengths n={self.n} and k={self.k}")
        if (self.domain.m, self.domain.k) != (self.n, self.k):
            raise DimensionError("Affine map domain does not match (n, k)")

    def linear_part(self) -> PolyMap:
        """g -> (r_1 . g, ..., r_l . g)."""
        components = []
        for row in self.r:
            poly = Poly.from_terms(self.n, [(_unit(t, self.n), v) for t, v in enumerate(row)])
            components.append(RatFunc(poly))
        return PolyMap(self.n, components)

    def polys(self) -> Tuple[Poly, ...]:
        """h_j as polynomials over (g, a)."""
        width = self.n + self.k
        result = []
        for r_row, s_row, const in zip(self.r, self.s, self.b):
            pairs = [(_unit(t, width), v) for t, v in enumerate(r_row)]
            pairs += [(_unit(self.n + t, width), v) for t, v in enumerate(s_row)]
            pairs.append(((0,) * width, const))
            result.append(Poly.from_terms(width, pairs))
        return tuple(result)

    def evaluate(self, g: Sequence[Scalar], a: Sequence[Scalar]) -> Point:
        point = make_point(tuple(g) + tuple(a))
        return tuple(p.evaluate(point) for p in self.polys())

    def to_map_descriptor(self) -> MapDescriptor:
        return MapDescriptor.from_polys(self.n, self.k, self.polys(), self.domain)

    def to_choice_instance(self, S: SmallSetModel) -> ChoiceInstance:
        return ChoiceInstance(self.n, self.k, self.l, self.to_map_descriptor(), S, self.domain)


def _unit(index: int, width: int) -> Tuple[int, ...]:
    exponents = [0] * width
    exponents[index] = 1
    return tuple(exponents)


def translation(h: AffineMapDescriptor) -> MapDescriptor:
    """h0(t, a) = (t_j + s_j . a + b_j)_j over (t, a) in M^(l+k)."""
    width = h.l + h.k
    polys = []
    for j, (s_row, const) in enumerate(zip(h.s, h.b)):
        pairs = [(_unit(j, width), 1)]
        pairs += [(_unit(h.l + t, width), v) for t, v in enumerate(s_row)]
        pairs.append(((0,) * width, const))
        polys.append(Poly.from_terms(width, pairs))
    return MapDescriptor.from_polys(h.l, h.k, polys)


def decompose_linear(h: AffineMapDescriptor, S: SmallSetModel) -> ChoiceDecomposition:
    """
    Single-piece decomposition (h0, X, Y) of an affine map.

    Args:
        h: affine map on its domain
        S: small set of arity h.n

    Returns:
        Y = image of S under g -> (r_j . g)_j, X_a = images of S cap Z_a,
        h0 = translation of Y by (s_j . a + b_j)_j
    """
    if S.m != h.n:
        raise DimensionError(f"Small set of arity {S.m} for an affine map on {h.n} coordinates")
    linear = h.linear_part()
    Y = SmallSetModel.image(S, linear)
    domain_members = ExplicitX(S, h.k, h.domain.membership_conditions())
    X = ImageX(domain_members, linear, model=Y)
    logger.info(f"decompose_linear: |S|={len(S)} -> |Y|={len(Y)}")
    return ChoiceDecomposition((ChoicePiece(translation(h), X, Y),), (('LINEAR',),))
