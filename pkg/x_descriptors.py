"""
Parameter-indexed finite families X_a inside a small-set model.

Every descriptor knows the model its fibers live in, so X_a is always a
subset of the model's points. Filters are bounded quantifiers over the
current fiber, never free first-order formulas, so evaluation terminates.
"""
import itertools
import logging
from enum import Enum
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from algebraic_real import Scalar
from descriptors import DefSetDescriptor
from errors import ContractViolation, DimensionError
from polynomials import Condition, ParamPoly, Point, PolyMap, make_point
from small_sets import SmallSetModel

logger = logging.getLogger(__name__)


class XKind(str, Enum):
    EXPLICIT = 'EXPLICIT'
    IMAGE = 'IMAGE'
    FILTERED = 'FILTERED'
    PRODUCT = 'PRODUCT'
    APPENDED = 'APPENDED'
    WIDENED = 'WIDENED'
    SUBSTITUTED = 'SUBSTITUTED'


class XDescriptor:
    """Base class; subclasses implement ``_compute``."""

    kind: XKind

    def __init__(self, model: SmallSetModel, k: int):
        self.model = model
        self.k = k

    @property
    def m(self) -> int:
        return self.model.m

    @cached_property
    def _cache(self) -> Dict[Point, Tuple[Point, ...]]:
        return {}

    def x_fiber(self, a: Sequence[Scalar]) -> Tuple[Point, ...]:
        a = make_point(a)
        if len(a) != self.k:
            raise DimensionError(f"Parameter of arity {len(a)} for a family with k={self.k}")
        if a not in self._cache:
            self._cache[a] = self._compute(a)
        return self._cache[a]

    def _compute(self, a: Point) -> Tuple[Point, ...]:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(m={self.m}, k={self.k})"


class ExplicitX(XDescriptor):
    """Model points b with all constraints true at (b, a)."""

    kind = XKind.EXPLICIT

    def __init__(self, model: SmallSetModel, k: int, constraints: Sequence[Condition] = ()):
        super().__init__(model, k)
        self.constraints = tuple(constraints)
        for c in self.constraints:
            if c.nvars != model.m + k:
                raise DimensionError(f"Constraint over {c.nvars} variables, expected {model.m + k}")

    def _compute(self, a: Point) -> Tuple[Point, ...]:
        return tuple(b for b in self.model.points if all(c.holds(b + a) for c in self.constraints))


class ImageX(XDescriptor):
    """Image of the parent fiber under a map on the b-block."""

    kind = XKind.IMAGE

    def __init__(self, parent: XDescriptor, mapping: PolyMap, model: Optional[SmallSetModel] = None):
        if mapping.n_in != parent.m:
            raise DimensionError(f"Map on {mapping.n_in} coordinates for a family of arity {parent.m}")
        super().__init__(model or SmallSetModel.image(parent.model, mapping), parent.k)
        self.parent = parent
        self.mapping = mapping

    def _compute(self, a: Point) -> Tuple[Point, ...]:
        return tuple(sorted({self.mapping.apply(b) for b in self.parent.x_fiber(a)}))


class FilteredX(XDescriptor):
    """Members of the parent fiber accepted by a bounded predicate."""

    kind = XKind.FILTERED

    def __init__(self, parent: XDescriptor, predicate: "XPredicate", model: Optional[SmallSetModel] = None):
        super().__init__(model or parent.model, parent.k)
        self.parent = parent
        self.predicate = predicate

    def _compute(self, a: Point) -> Tuple[Point, ...]:
        kept = self.predicate.select(self.parent.x_fiber(a), a)
        if self.model is not self.parent.model:
            kept = tuple(b for b in kept if b in self.model)
        return kept


class ProductX(XDescriptor):
    """Cartesian product of fibers sharing the parameter a."""

    kind = XKind.PRODUCT

    def __init__(self, parents: Sequence[XDescriptor], model: Optional[SmallSetModel] = None):
        parents = tuple(parents)
        if len({p.k for p in parents}) > 1:
            raise DimensionError("Product of families with different parameter arities")
        super().__init__(model or SmallSetModel.product([p.model for p in parents]), parents[0].k)
        self.parents = parents

    def _compute(self, a: Point) -> Tuple[Point, ...]:
        fibers = [p.x_fiber(a) for p in self.parents]
        return tuple(sorted(tuple(itertools.chain.from_iterable(c)) for c in itertools.product(*fibers)))


class AppendedX(XDescriptor):
    """X'_(a, e) = {b in X_a : f(b, a) = e}, with e inserted at ``position``."""

    kind = XKind.APPENDED

    def __init__(self, parent: XDescriptor, mapping: PolyMap, position: int):
        if mapping.n_in != parent.m + parent.k:
            raise DimensionError(f"Map on {mapping.n_in} coordinates, expected {parent.m + parent.k}")
        super().__init__(parent.model, parent.k + mapping.n_out)
        self.parent = parent
        self.mapping = mapping
        self.position = position

    def _compute(self, a: Point) -> Tuple[Point, ...]:
        n = self.mapping.n_out
        e = a[self.position:self.position + n]
        base = a[:self.position] + a[self.position + n:]
        return tuple(b for b in self.parent.x_fiber(base) if self.mapping.apply(b + base) == e)


class WidenedX(XDescriptor):
    """Parent family with extra parameters it ignores."""

    kind = XKind.WIDENED

    def __init__(self, parent: XDescriptor, position: int, count: int = 1):
        super().__init__(parent.model, parent.k + count)
        self.parent = parent
        self.position = position
        self.count = count

    def _compute(self, a: Point) -> Tuple[Point, ...]:
        return self.parent.x_fiber(a[:self.position] + a[self.position + self.count:])


class SubstitutedX(XDescriptor):
    """
    Parameter ``position`` replaced by the b-coordinate ``source``.

    X'_a' = {b in S : b in X_(a' with b[source] inserted at position)}.
    """

    kind = XKind.SUBSTITUTED

    def __init__(self, parent: XDescriptor, position: int, source: int):
        if parent.k < 1:
            raise DimensionError("No parameter left to substitute")
        super().__init__(parent.model, parent.k - 1)
        self.parent = parent
        self.position = position
        self.source = source

    def _compute(self, a: Point) -> Tuple[Point, ...]:
        kept = []
        for b in self.model.points:
            full = a[:self.position] + (b[self.source],) + a[self.position:]
            if b in self.parent.x_fiber(full):
                kept.append(b)
        return tuple(kept)


def x_fiber(X: XDescriptor, a: Sequence[Scalar]) -> Tuple[Point, ...]:
    return X.x_fiber(a)


# -- bounded predicates ------------------------------------------------------

class XPredicate:
    """Select members of a finite fiber; may look at the whole fiber."""

    name = 'PREDICATE'

    def select(self, members: Tuple[Point, ...], a: Point) -> Tuple[Point, ...]:
        raise NotImplementedError


class ConditionFilter(XPredicate):
    name = 'CONDITION'

    def __init__(self, conditions: Sequence[Condition]):
        self.conditions = tuple(conditions)

    def select(self, members, a):
        return tuple(b for b in members if all(c.holds(b + a) for c in self.conditions))


class ZeroTestFilter(XPredicate):
    """Keep b according to whether r(b, a, -) vanishes identically."""

    name = 'ZERO_TEST'

    def __init__(self, r: ParamPoly, vanishing: bool):
        self.r = r
        self.vanishing = vanishing

    def select(self, members, a):
        return tuple(b for b in members if self.r.vanishes_at(b, a) == self.vanishing)


class IsolatedFilter(XPredicate):
    """Members whose Z-fiber meets no other member's Z-fiber."""

    name = 'ISOLATED'

    def __init__(self, Z: DefSetDescriptor):
        self.Z = Z

    def select(self, members, a):
        fibers = [set(self.Z.fiber(d, a)) for d in members]
        kept = []
        for i, d in enumerate(members):
            if all(fibers[i].isdisjoint(fibers[j]) for j in range(len(members)) if j != i):
                kept.append(d)
        return tuple(kept)


class CollidingPairFilter(XPredicate):
    """Pairs (d1, d2), d1 != d2, whose Z-fibers intersect."""

    name = 'COLLIDING_PAIR'

    def __init__(self, Z: DefSetDescriptor):
        self.Z = Z

    def select(self, members, a):
        arity = self.Z.m
        kept = []
        for pair in members:
            d1, d2 = pair[:arity], pair[arity:]
            if d1 != d2 and not set(self.Z.fiber(d1, a)).isdisjoint(self.Z.fiber(d2, a)):
                kept.append(pair)
        return tuple(kept)


class CoveredFilter(XPredicate):
    """b with a non-empty fiber contained in some inner fiber over inner X_a."""

    name = 'COVERED'

    def __init__(self, Z: DefSetDescriptor, inner_z: DefSetDescriptor, inner_x: XDescriptor):
        if (Z.k, Z.l) != (inner_z.k, inner_z.l):
            raise DimensionError("Covering families must share k and l")
        self.Z = Z
        self.inner_z = inner_z
        self.inner_x = inner_x

    def select(self, members, a):
        inner = [set(self.inner_z.fiber(e, a)) for e in self.inner_x.x_fiber(a)]
        kept = []
        for b in members:
            own = set(self.Z.fiber(b, a))
            if own and any(own <= fiber for fiber in inner):
                kept.append(b)
        return tuple(kept)


class RepresentativeFilter(XPredicate):
    """Lexicographically least member of each class of equal non-empty fibers."""

    name = 'REPRESENTATIVE'

    def __init__(self, Z: DefSetDescriptor, cap: Optional[int] = None):
        self.Z = Z
        self.cap = cap

    def select(self, members, a):
        classes: Dict[frozenset, List[Point]] = {}
        for b in members:
            fiber = frozenset(self.Z.fiber(b, a))
            if fiber:
                classes.setdefault(fiber, []).append(b)
        kept = []
        for group in classes.values():
            if self.cap is not None and len(group) > self.cap:
                raise ContractViolation(
                    f"Collision class of size {len(group)} exceeds cap {self.cap}",
                    {"a": [str(v) for v in a], "class": [[str(v) for v in b] for b in group]},
                )
            kept.append(min(group))
        return tuple(sorted(kept))


class ImageFilter(XPredicate):
    """Members t whose value h(t, a) lies in ``target.image_at(a)``."""

    name = 'IMAGE'

    def __init__(self, h, target):
        self.h = h
        self.target = target

    def select(self, members, a):
        image = set(self.target.image_at(a))
        kept = []
        for t in members:
            value = self.h.evaluate(t, a)
            if value is not None and value in image:
                kept.append(t)
        return tuple(kept)
