"""
Semialgebraic set descriptors in normal form and exact fiber evaluation.

A descriptor with layout (m, k, l) describes a subset of M^(m+k+l) whose
points are written (b, a, c). Each output coordinate c_j is cut out by its
own parametrized polynomial; strict inequalities and coupling equations
may tie the coordinates together, and ambient conditions and guards
restrict (b, a).
"""
import itertools
import logging
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from algebraic_real import AlgebraicReal, Scalar, root_isolate
from errors import ContractViolation, DegenerateFiberError, DimensionError
from monomial_order import OrderIndex
from polynomials import Condition, ParamPoly, Point, Poly, RatFunc, guard_conditions, make_point

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Selection:
    """Pick the ``index``-th (1-based) of ``bound`` ordered fiber elements."""

    index: int
    bound: int

    def __post_init__(self):
        if not 1 <= self.index <= self.bound:
            raise ValueError(f"Selection index {self.index} outside 1..{self.bound}")

    def pick(self, ordered: Sequence[Point]) -> Tuple[Point, ...]:
        """Smallest element repeated until the list has ``bound`` entries."""
        s = len(ordered)
        if s == 0:
            return ()
        if s > self.bound:
            raise ContractViolation(
                f"Fiber of size {s} exceeds selection bound {self.bound}",
                {"fiber": [list(map(str, p)) for p in ordered]},
            )
        padded = [ordered[0]] * (self.bound - s + 1) + list(ordered[1:])
        return (padded[self.index - 1],)


@dataclass(frozen=True, eq=False)
class DefSetDescriptor:
    """
    Normal-form description of Z in M^(m+k+l).

    Attributes:
        equations: one ParamPoly per output coordinate, in (b; a; c_j)
        strict: polynomials over (b, a, c), each required > 0
        side_equations: polynomials over (b, a, c), each required = 0
        ambient: sign conditions over (b, a)
        guards: rational functions over b, each required != 0
        nondegenerate: identically vanishing fibers count as empty
        coordinate_selections: per-coordinate root selection, applied first
        selection: selection on the whole (lexicographically ordered) fiber
    """

    m: int
    k: int
    l: int
    equations: Tuple[ParamPoly, ...] = ()
    strict: Tuple[Poly, ...] = ()
    side_equations: Tuple[Poly, ...] = ()
    ambient: Tuple[Condition, ...] = ()
    guards: Tuple[RatFunc, ...] = ()
    nondegenerate: bool = False
    coordinate_selections: Tuple[Optional[Selection], ...] = ()
    selection: Optional[Selection] = None

    def __post_init__(self):
        object.__setattr__(self, 'equations', tuple(self.equations))
        object.__setattr__(self, 'strict', tuple(self.strict))
        object.__setattr__(self, 'side_equations', tuple(self.side_equations))
        object.__setattr__(self, 'ambient', tuple(self.ambient))
        object.__setattr__(self, 'guards', tuple(self.guards))
        if not self.coordinate_selections:
            object.__setattr__(self, 'coordinate_selections', (None,) * self.l)
        else:
            object.__setattr__(self, 'coordinate_selections', tuple(self.coordinate_selections))
        if len(self.equations) != self.l or len(self.coordinate_selections) != self.l:
            raise DimensionError(f"Expected {self.l} equations, got {len(self.equations)}")
        for p in self.equations:
            if (p.n, p.k) != (self.m, self.k):
                raise DimensionError(f"Equation over ({p.n},{p.k}) in a ({self.m},{self.k}) layout")
        width = self.m + self.k + self.l
        for q in self.strict + self.side_equations:
            if q.nvars != width:
                raise DimensionError(f"Condition over {q.nvars} variables, expected {width}")
        for c in self.ambient:
            if c.nvars != self.m + self.k:
                raise DimensionError(f"Ambient condition over {c.nvars} variables, expected {self.m + self.k}")
        for g in self.guards:
            if g.nvars != self.m:
                raise DimensionError(f"Guard over {g.nvars} variables, expected {self.m}")

    @classmethod
    def region(cls, m: int, k: int, ambient: Sequence[Condition] = (),
               guards: Sequence[RatFunc] = ()) -> "DefSetDescriptor":
        """A descriptor with l = 0, i.e. a subset of (b, a)-space."""
        return cls(m=m, k=k, l=0, ambient=tuple(ambient), guards=tuple(guards))

    @cached_property
    def _fiber_cache(self) -> Dict[Tuple[Point, Point], Tuple[Point, ...]]:
        """Private memo of computed fibers keyed by (b, a); outside fields, equality and hashing."""
        return {}

    def with_changes(self, **changes) -> "DefSetDescriptor":
        return replace(self, **changes)

    # -- structure ---------------------------------------------------------

    def membership_conditions(self) -> Tuple[Condition, ...]:
        """Ambient conditions and guards, all as conditions over (b, a)."""
        embed = list(range(self.m))
        lifted = tuple(c.remap(embed, self.m + self.k) for g in self.guards for c in guard_conditions(g))
        return self.ambient + lifted

    def fiber_bound(self) -> int:
        """Upper bound on fiber sizes away from degenerate points."""
        if self.selection is not None:
            return 1
        bound = 1
        for p, chosen in zip(self.equations, self.coordinate_selections):
            bound *= 1 if chosen is not None else max(p.z_degree, 1)
        return bound

    def has_singleton_fibers(self) -> bool:
        return self.fiber_bound() <= 1

    def graph_components(self) -> Optional[Tuple[ParamPoly, ...]]:
        """The g_j when Z is exactly the graph {c_j = g_j(b, a)}, else None."""
        if self.strict or self.side_equations or self.selection is not None:
            return None
        components = []
        for p in self.equations:
            lead = p.coeff(_z_index(self.k))
            rest = [i for i in p.coeffs if i.z_degree > 1 or (i.z_degree == 1 and any(i.exponents))]
            if rest or lead.is_zero() or not lead.is_constant() or lead.constant_value() != 1:
                return None
            components.append(-ParamPoly(p.n, p.k, {i: c for i, c in p.coeffs.items() if i.z_degree == 0}))
        return tuple(components)

    # -- evaluation --------------------------------------------------------

    def admits(self, b: Sequence[Scalar], a: Sequence[Scalar]) -> bool:
        for g in self.guards:
            if g.numer.evaluate(b).is_zero() or g.denom.evaluate(b).is_zero():
                return False
        point = tuple(b) + tuple(a)
        return all(c.holds(point) for c in self.ambient)

    def fiber(self, b: Sequence[Scalar], a: Sequence[Scalar]) -> Tuple[Point, ...]:
        """The finite fiber Z_{b,a}, sorted lexicographically."""
        b, a = make_point(b), make_point(a)
        if len(b) != self.m or len(a) != self.k:
            raise DimensionError(f"Fiber at arities ({len(b)}, {len(a)}) of a ({self.m}, {self.k}) layout")
        key = (b, a)
        cache = self._fiber_cache
        if key not in cache:
            cache[key] = self._compute_fiber(b, a)
        return cache[key]

    def _compute_fiber(self, b: Point, a: Point) -> Tuple[Point, ...]:
        if not self.admits(b, a):
            return ()
        per_coordinate: List[List[AlgebraicReal]] = []
        for p, chosen in zip(self.equations, self.coordinate_selections):
            coeffs = p.z_coefficients(b, a)
            if all(c.is_zero() for c in coeffs):
                if self.nondegenerate:
                    return ()
                raise DegenerateFiberError(b, a)
            roots = [(r,) for r in root_isolate(coeffs)]
            if chosen is not None:
                roots = list(chosen.pick(roots))
            if not roots:
                return ()
            per_coordinate.append([r[0] for r in roots])
        candidates = [tuple(c) for c in itertools.product(*per_coordinate)]
        if self.strict or self.side_equations:
            candidates = [c for c in candidates if self._satisfies_conditions(b + a + c)]
        candidates.sort()
        if self.selection is not None:
            return self.selection.pick(candidates)
        return tuple(candidates)

    def _satisfies_conditions(self, point: Point) -> bool:
        if any(not q.evaluate(point).is_zero() for q in self.side_equations):
            return False
        return all(q.evaluate(point).sign() > 0 for q in self.strict)

    def contains(self, b: Sequence[Scalar], a: Sequence[Scalar], c: Sequence[Scalar] = ()) -> bool:
        return make_point(c) in self.fiber(b, a)

    def __repr__(self) -> str:
        eqs = "; ".join(str(p) for p in self.equations)
        return f"DefSetDescriptor(m={self.m}, k={self.k}, l={self.l}, [{eqs}])"


def _z_index(k: int) -> OrderIndex:
    return OrderIndex((0,) * k, 1)


def fiber(Z: DefSetDescriptor, b: Sequence[Scalar], a: Sequence[Scalar]) -> Tuple[Point, ...]:
    return Z.fiber(b, a)

