"""
Monomial well-order on N^k x N used as the induction measure.

An index (i_1, ..., i_k, r) stands for the monomial y_1^i_1 ... y_k^i_k z^r.
Indices are compared by total degree first and lexicographically on
(i_1, ..., i_k, r) among equal degrees. The order has type omega, so
``sigma``/``sigma_inv`` enumerate it.
"""
import logging
from dataclasses import dataclass
from functools import total_ordering
from math import comb
from typing import Optional, Tuple, TYPE_CHECKING

from errors import DimensionError

if TYPE_CHECKING:
    from polynomials import Poly

logger = logging.getLogger(__name__)


@total_ordering
@dataclass(frozen=True)
class OrderIndex:
    """Exponent vector of the y-block plus the z-degree."""

    exponents: Tuple[int, ...]
    z_degree: int

    def __post_init__(self):
        if self.z_degree < 0 or any(e < 0 for e in self.exponents):
            raise ValueError(f"Negative exponent in index {self.as_tuple()}")

    @classmethod
    def from_tuple(cls, values: Tuple[int, ...]) -> "OrderIndex":
        if not values:
            raise DimensionError("An index needs at least the z-degree")
        return cls(tuple(values[:-1]), values[-1])

    @classmethod
    def zero(cls, k: int) -> "OrderIndex":
        return cls((0,) * k, 0)

    @property
    def k(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents) + self.z_degree

    def as_tuple(self) -> Tuple[int, ...]:
        return self.exponents + (self.z_degree,)

    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return (self.degree, self.as_tuple())

    def __lt__(self, other: "OrderIndex") -> bool:
        return precedes(self, other)

    def __str__(self) -> str:
        return "(" + ",".join(str(v) for v in self.as_tuple()) + ")"


def precedes(alpha: OrderIndex, beta: OrderIndex) -> bool:
    """Strict comparison alpha < beta: degree clause first, then lex."""
    if alpha.k != beta.k:
        raise DimensionError(f"Cannot compare indices with k={alpha.k} and k={beta.k}")
    if alpha.degree != beta.degree:
        return alpha.degree < beta.degree
    return alpha.as_tuple() < beta.as_tuple()


def preceq(alpha: OrderIndex, beta: OrderIndex) -> bool:
    return alpha == beta or precedes(alpha, beta)


def monomial_order(p: "Poly") -> Optional[OrderIndex]:
    """Maximal index of the support of a polynomial in (y_1..y_k, z), or None for 0."""
    if p.nvars < 1:
        raise DimensionError("monomial_order needs at least the z variable")
    if p.is_zero():
        return None
    return max(OrderIndex.from_tuple(exponents) for exponents in p.terms)


def _count_of_degree(degree: int, parts: int) -> int:
    # Compositions of `degree` into `parts` naturals.
    if parts == 0:
        return 1 if degree == 0 else 0
    return comb(degree + parts - 1, parts - 1)


def _count_up_to(degree: int, parts: int) -> int:
    # Indices of total degree <= degree.
    if degree < 0:
        return 0
    return comb(degree + parts, parts)


def sigma(n: int, k: int) -> OrderIndex:
    """The n-th index (0-based) of N^k x N in the well-order."""
    if n < 0:
        raise ValueError(f"sigma is defined on naturals, got {n}")
    parts = k + 1
    degree = 0
    while _count_up_to(degree, parts) <= n:
        degree += 1
    rank = n - _count_up_to(degree - 1, parts)

    values = []
    remaining = degree
    for position in range(parts - 1):
        slots_after = parts - position - 1
        value = 0
        while True:
            block = _count_of_degree(remaining - value, slots_after)
            if rank < block:
                break
            rank -= block
            value += 1
        values.append(value)
        remaining -= value
    values.append(remaining)
    return OrderIndex.from_tuple(tuple(values))


def sigma_inv(alpha: OrderIndex) -> int:
    """Position of alpha in the well-order; inverse of ``sigma``."""
    values = alpha.as_tuple()
    parts = len(values)
    rank = _count_up_to(alpha.degree - 1, parts)
    remaining = alpha.degree
    for position in range(parts - 1):
        slots_after = parts - position - 1
        for value in range(values[position]):
            rank += _count_of_degree(remaining - value, slots_after)
        remaining -= values[position]
    return rank


def indices_up_to(degree: int, k: int) -> Tuple[OrderIndex, ...]:
    """All indices of total degree <= degree, in increasing order."""
    return tuple(sigma(n, k) for n in range(_count_up_to(degree, k + 1)))
