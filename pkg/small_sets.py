"""
Finite models of small sets.

A model is an explicit sorted list of points plus a derivation tag telling
how it was obtained from base sets: an image under a rational map, a
cartesian product, or a subset. Smallness itself is never checked.
"""
import itertools
import logging
from enum import Enum
from functools import cached_property
from typing import Callable, Iterable, Optional, Sequence, Tuple

from algebraic_real import Scalar
from errors import DimensionError
from polynomials import Point, PolyMap, make_point

logger = logging.getLogger(__name__)


class Derivation(str, Enum):
    BASE = 'BASE'
    IMAGE = 'IMAGE'
    PRODUCT = 'PRODUCT'
    SUBSET = 'SUBSET'


def _canonical(points: Iterable[Point]) -> Tuple[Point, ...]:
    return tuple(sorted(set(points)))


class SmallSetModel:
    """Explicit point list of arity ``m`` with its derivation chain."""

    def __init__(self, m: int, points: Iterable[Sequence[Scalar]], derivation: Derivation = Derivation.BASE,
                 parents: Sequence["SmallSetModel"] = (), mapping: Optional[PolyMap] = None):
        self.m = m
        self.points = _canonical(make_point(p) for p in points)
        for p in self.points:
            if len(p) != m:
                raise DimensionError(f"Point {p} does not have arity {m}")
        self.derivation = Derivation(derivation)
        self.parents = tuple(parents)
        self.mapping = mapping

    @classmethod
    def base(cls, m: int, points: Iterable[Sequence[Scalar]]) -> "SmallSetModel":
        return cls(m, points)

    @classmethod
    def image(cls, parent: "SmallSetModel", mapping: PolyMap) -> "SmallSetModel":
        if mapping.n_in != parent.m:
            raise DimensionError(f"Map on {mapping.n_in} coordinates applied to a set of arity {parent.m}")
        return cls(mapping.n_out, (mapping.apply(p) for p in parent.points),
                   Derivation.IMAGE, (parent,), mapping)

    @classmethod
    def product(cls, parents: Sequence["SmallSetModel"]) -> "SmallSetModel":
        points = (tuple(itertools.chain.from_iterable(combo))
                  for combo in itertools.product(*(p.points for p in parents)))
        return cls(sum(p.m for p in parents), points, Derivation.PRODUCT, parents)

    @classmethod
    def subset(cls, parent: "SmallSetModel", keep: Callable[[Point], bool]) -> "SmallSetModel":
        return cls(parent.m, (p for p in parent.points if keep(p)), Derivation.SUBSET, (parent,))

    @classmethod
    def subset_of_points(cls, parent: "SmallSetModel", points: Iterable[Point]) -> "SmallSetModel":
        chosen = set(points)
        return cls.subset(parent, lambda p: p in chosen)

    def __contains__(self, point: Point) -> bool:
        return point in self._point_set

    @cached_property
    def _point_set(self) -> frozenset:
        return frozenset(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def chain_problems(self) -> Tuple[str, ...]:
        """
        Walk the derivation chain and report every inconsistency.

        An empty result means every node reaches BASE through IMAGE, PRODUCT
        and SUBSET steps whose point lists match their definitions.
        """
        problems = []
        seen = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            if node.derivation is Derivation.BASE:
                if node.parents:
                    problems.append("BASE set with parents")
                continue
            if not node.parents:
                problems.append(f"{node.derivation.value} set without parent")
                continue
            if node.derivation is Derivation.IMAGE:
                expected = _canonical(node.mapping.apply(p) for p in node.parents[0].points)
                if expected != node.points:
                    problems.append("IMAGE points differ from the image of the parent")
            elif node.derivation is Derivation.SUBSET:
                parent = node.parents[0]
                if any(p not in parent for p in node.points):
                    problems.append("SUBSET contains a point outside its parent")
            elif node.derivation is Derivation.PRODUCT:
                expected = SmallSetModel.product(node.parents).points
                if expected != node.points:
                    problems.append("PRODUCT points differ from the product of the parents")
            stack.extend(node.parents)
        return tuple(problems)

    def depth(self) -> int:
        if not self.parents:
            return 0
        return 1 + max(p.depth() for p in self.parents)

    def __repr__(self) -> str:
        return f"SmallSetModel(m={self.m}, {len(self.points)} points, {self.derivation.value})"
