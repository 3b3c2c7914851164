"""
Exact real algebraic numbers and univariate root isolation.

An ``AlgebraicReal`` is stored as its monic irreducible minimal polynomial
over Q together with a closed rational interval containing exactly one of
its roots. Rational values use a degree-one minimal polynomial and a
point interval, and take a fast path through ``fractions.Fraction``.

Factorization, resultants, isolating intervals and Sturm chains come from
sympy; bisection and sign tests run on plain ``Fraction`` coefficients.
"""
import logging
from fractions import Fraction
from functools import total_ordering
from typing import List, Optional, Sequence, Tuple, Union

import sympy
from sympy import Poly as SymPoly, QQ

from errors import DomainError

logger = logging.getLogger(__name__)

_T = sympy.Symbol('t')

Scalar = Union[int, Fraction, "AlgebraicReal"]


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Parse a decimal-free rational such as ``"-3/4"`` or ``"5"``."""
    if isinstance(text, bool):
        raise ValueError(f"Not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise ValueError(f"Not a rational: {text!r}")
    s = text.strip()
    if not s or any(ch in s for ch in '.eE_ '):
        raise ValueError(f"Not a decimal-free rational: {text!r}")
    numerator, _, denominator = s.partition('/')
    try:
        num = int(numerator)
        den = int(denominator) if denominator else 1
    except ValueError as e:
        raise ValueError(f"Not a rational: {text!r}") from e
    if den == 0:
        raise ValueError(f"Zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def to_sympy_rational(q: Union[int, Fraction]) -> sympy.Rational:
    q = Fraction(q)
    return sympy.Rational(q.numerator, q.denominator)


def from_sympy_rational(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def _strip(coeffs: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    values = list(coeffs)
    while values and values[-1] == 0:
        values.pop()
    return tuple(values)


def _sympy_poly(coeffs: Sequence[Fraction], gen=_T) -> SymPoly:
    """Coefficients are ordered from the constant term upwards."""
    return SymPoly.from_list([to_sympy_rational(c) for c in reversed(coeffs)], gen, domain=QQ)


def _coeffs_of(poly: SymPoly) -> Tuple[Fraction, ...]:
    return tuple(from_sympy_rational(c) for c in reversed(poly.all_coeffs()))


def _horner(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _sign(value: Fraction) -> int:
    return (value > 0) - (value < 0)


@total_ordering
class AlgebraicReal:
    """A real algebraic number with exact comparison and arithmetic."""

    def __init__(self, min_poly: Sequence[Fraction], lo: Fraction, hi: Fraction):
        """
        Build from a monic irreducible polynomial and an isolating interval.

        The caller guarantees irreducibility and that [lo, hi] holds exactly
        one root; use ``from_root`` for untrusted data.
        """
        self._min_poly = tuple(Fraction(c) for c in min_poly)
        self._lo = Fraction(lo)
        self._hi = Fraction(hi)
        self._rational: Optional[Fraction] = None
        if len(self._min_poly) == 2:
            self._rational = -self._min_poly[0] / self._min_poly[1]
            self._lo = self._hi = self._rational
        # Working interval, private memo state: refinement only narrows it
        # around the same root, so equality, hashing and ``interval`` do not depend on it.
        self._cur_lo = self._lo
        self._cur_hi = self._hi

    @classmethod
    def from_rational(cls, q: Union[int, Fraction]) -> "AlgebraicReal":
        q = Fraction(q)
        return cls((-q, Fraction(1)), q, q)

    @classmethod
    def from_root(cls, coeffs: Sequence[Union[int, Fraction]], lo: Union[int, Fraction],
                  hi: Union[int, Fraction]) -> "AlgebraicReal":
        """The unique root of ``coeffs`` (constant term first) inside [lo, hi]."""
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise DomainError(f"Empty interval [{lo}, {hi}]")
        values = _strip([Fraction(c) for c in coeffs])
        if not values:
            raise DomainError("The zero polynomial has no isolated root")
        poly = _sympy_poly(values)
        s_lo, s_hi = to_sympy_rational(lo), to_sympy_rational(hi)
        if poly.degree() < 1 or poly.count_roots(s_lo, s_hi) < 1:
            raise DomainError(f"No root in [{format_rational(lo)}, {format_rational(hi)}]")
        hits = []
        for factor, _ in poly.factor_list()[1]:
            count = factor.count_roots(s_lo, s_hi)
            if count:
                hits.append((factor, count))
        if len(hits) != 1 or hits[0][1] != 1:
            raise DomainError(
                f"[{format_rational(lo)}, {format_rational(hi)}] does not isolate a single root"
            )
        return cls._from_factor(hits[0][0], lo, hi)

    @classmethod
    def _from_factor(cls, factor: SymPoly, lo: Fraction, hi: Fraction) -> "AlgebraicReal":
        coeffs = _coeffs_of(factor.monic())
        if len(coeffs) == 2:
            return cls.from_rational(-coeffs[0])
        return cls(coeffs, lo, hi)

    # -- accessors ---------------------------------------------------------

    @property
    def min_poly(self) -> Tuple[Fraction, ...]:
        return self._min_poly

    @property
    def interval(self) -> Tuple[Fraction, Fraction]:
        """The interval given at construction; refinement never changes it."""
        return (self._lo, self._hi)

    @property
    def degree(self) -> int:
        return len(self._min_poly) - 1

    @property
    def is_rational(self) -> bool:
        return self._rational is not None

    def to_fraction(self) -> Fraction:
        if self._rational is None:
            raise DomainError(f"{self} is irrational")
        return self._rational

    def is_zero(self) -> bool:
        return self._rational == 0

    def bounds(self) -> Tuple[Fraction, Fraction]:
        return (self._cur_lo, self._cur_hi)

    def to_float(self) -> float:
        if self._rational is not None:
            return float(self._rational)
        self.refine(Fraction(1, 10 ** 12))
        return float((self._cur_lo + self._cur_hi) / 2)

    # -- refinement --------------------------------------------------------

    def _bisect(self) -> None:
        if self._rational is not None:
            return
        mid = (self._cur_lo + self._cur_hi) / 2
        s_mid = _sign(_horner(self._min_poly, mid))
        if s_mid == _sign(_horner(self._min_poly, self._cur_lo)):
            self._cur_lo = mid
        else:
            self._cur_hi = mid

    def refine(self, width: Fraction) -> Tuple[Fraction, Fraction]:
        """Shrink the working interval below ``width``."""
        while self._cur_hi - self._cur_lo > width:
            self._bisect()
        return self.bounds()

    # -- comparison --------------------------------------------------------

    def _same_root(self, other: "AlgebraicReal") -> bool:
        if self._rational is not None or other._rational is not None:
            return self._rational == other._rational
        if self._min_poly != other._min_poly:
            return False
        lo = max(self._cur_lo, other._cur_lo)
        hi = min(self._cur_hi, other._cur_hi)
        if lo > hi:
            return False
        return _sign(_horner(self._min_poly, lo)) != _sign(_horner(self._min_poly, hi))

    def _compare(self, other: "AlgebraicReal") -> int:
        if self._same_root(other):
            return 0
        while True:
            if self._cur_hi < other._cur_lo:
                return -1
            if other._cur_hi < self._cur_lo:
                return 1
            self._bisect()
            other._bisect()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._rational == Fraction(other)
        if not isinstance(other, AlgebraicReal):
            return NotImplemented
        return self._same_root(other)

    def __lt__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = AlgebraicReal.from_rational(other)
        if not isinstance(other, AlgebraicReal):
            return NotImplemented
        return self._compare(other) < 0

    def __hash__(self) -> int:
        if self._rational is not None:
            return hash(self._rational)
        return hash(self._min_poly)

    def sign(self) -> int:
        if self._rational is not None:
            return _sign(self._rational)
        return self._compare(_ZERO)

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "AlgebraicReal":
        if self._rational is not None:
            return AlgebraicReal.from_rational(-self._rational)
        return self._scaled(Fraction(-1))

    def __add__(self, other: Scalar) -> "AlgebraicReal":
        other = as_real(other)
        if self._rational is not None and other._rational is not None:
            return AlgebraicReal.from_rational(self._rational + other._rational)
        if other._rational is not None:
            return self._shifted(other._rational)
        if self._rational is not None:
            return other._shifted(self._rational)
        u = sympy.Symbol('u')
        res = sympy.resultant(self._expr(u), other._expr(_T - u), u)
        return _identify_root(
            res, self, other,
            lambda x, y: (x[0] + y[0], x[1] + y[1]),
        )

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> "AlgebraicReal":
        return self + (-as_real(other))

    def __rsub__(self, other: Scalar) -> "AlgebraicReal":
        return as_real(other) + (-self)

    def __mul__(self, other: Scalar) -> "AlgebraicReal":
        other = as_real(other)
        if self.is_zero() or other.is_zero():
            return _ZERO
        if self._rational is not None and other._rational is not None:
            return AlgebraicReal.from_rational(self._rational * other._rational)
        if other._rational is not None:
            return self._scaled(other._rational)
        if self._rational is not None:
            return other._scaled(self._rational)
        u = sympy.Symbol('u')
        degree = other.degree
        homogenized = sum(
            to_sympy_rational(c) * _T ** i * u ** (degree - i)
            for i, c in enumerate(other._min_poly)
        )
        res = sympy.resultant(self._expr(u), homogenized, u)
        return _identify_root(res, self, other, _interval_product)

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicReal":
        if self.is_zero():
            raise DomainError("Division by zero")
        if self._rational is not None:
            return AlgebraicReal.from_rational(1 / self._rational)
        while self._cur_lo <= 0 <= self._cur_hi:
            self._bisect()
        reversed_coeffs = tuple(reversed(self._min_poly))
        lead = reversed_coeffs[-1]
        return AlgebraicReal(
            tuple(c / lead for c in reversed_coeffs),
            1 / self._cur_hi,
            1 / self._cur_lo,
        )

    def __truediv__(self, other: Scalar) -> "AlgebraicReal":
        return self * as_real(other).inverse()

    def __rtruediv__(self, other: Scalar) -> "AlgebraicReal":
        return as_real(other) * self.inverse()

    def __pow__(self, exponent: int) -> "AlgebraicReal":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result, base = _ONE, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def _expr(self, var):
        return sum(to_sympy_rational(c) * var ** i for i, c in enumerate(self._min_poly))

    def _sympy(self) -> SymPoly:
        return _sympy_poly(self._min_poly)

    def _shifted(self, q: Fraction) -> "AlgebraicReal":
        shifted = self._sympy().compose(SymPoly(_T - to_sympy_rational(q), _T, domain=QQ))
        return AlgebraicReal(_coeffs_of(shifted.monic()), self._cur_lo + q, self._cur_hi + q)

    def _scaled(self, q: Fraction) -> "AlgebraicReal":
        scaled = self._sympy().compose(SymPoly(_T / to_sympy_rational(q), _T, domain=QQ))
        lo, hi = self._cur_lo * q, self._cur_hi * q
        if q < 0:
            lo, hi = hi, lo
        return AlgebraicReal(_coeffs_of(scaled.monic()), lo, hi)

    # -- display -----------------------------------------------------------

    def __repr__(self) -> str:
        if self._rational is not None:
            return f"AlgebraicReal({format_rational(self._rational)})"
        return (f"AlgebraicReal(root of {list(map(format_rational, self._min_poly))} "
                f"in [{format_rational(self._lo)}, {format_rational(self._hi)}])")

    def __str__(self) -> str:
        if self._rational is not None:
            return format_rational(self._rational)
        return f"~{self.to_float():.6g}"


_ZERO = AlgebraicReal.from_rational(0)
_ONE = AlgebraicReal.from_rational(1)


def as_real(value: Scalar) -> AlgebraicReal:
    if isinstance(value, AlgebraicReal):
        return value
    if isinstance(value, bool):
        raise TypeError(f"Not a number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return AlgebraicReal.from_rational(value)
    if isinstance(value, sympy.Rational):
        return AlgebraicReal.from_rational(from_sympy_rational(value))
    raise TypeError(f"Cannot convert {value!r} to AlgebraicReal")


def _interval_product(x: Tuple[Fraction, Fraction], y: Tuple[Fraction, Fraction]):
    products = [x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]]
    return (min(products), max(products))


def _identify_root(res_expr, a: AlgebraicReal, b: AlgebraicReal, bounds) -> AlgebraicReal:
    """Pick the root of ``res_expr`` that the interval combination of a, b encloses."""
    resultant = SymPoly(res_expr, _T, domain=QQ)
    if resultant.is_zero:
        raise DomainError("Vanishing resultant")
    squarefree = resultant.sqf_part()
    while True:
        lo, hi = bounds(a.bounds(), b.bounds())
        if squarefree.count_roots(to_sympy_rational(lo), to_sympy_rational(hi)) == 1:
            break
        a._bisect()
        b._bisect()
    for factor, _ in squarefree.factor_list()[1]:
        if factor.count_roots(to_sympy_rational(lo), to_sympy_rational(hi)):
            return AlgebraicReal._from_factor(factor, lo, hi)
    raise DomainError("Lost the enclosed root")


def _isolate_rational(coeffs: Sequence[Fraction]) -> List[AlgebraicReal]:
    poly = _sympy_poly(coeffs)
    roots: List[AlgebraicReal] = []
    for factor, _ in poly.factor_list()[1]:
        if factor.degree() == 1:
            c0, c1 = _coeffs_of(factor)
            roots.append(AlgebraicReal.from_rational(-c0 / c1))
            continue
        monic = _coeffs_of(factor.monic())
        for (lo, hi), _ in factor.intervals():
            roots.append(AlgebraicReal(monic, from_sympy_rational(lo), from_sympy_rational(hi)))
    return sorted(roots)


def _evaluate(coeffs: Sequence[AlgebraicReal], x: AlgebraicReal) -> AlgebraicReal:
    acc = _ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _isolate_algebraic(values: Sequence[AlgebraicReal]) -> List[AlgebraicReal]:
    # Norm polynomial: eliminate each irrational coefficient with a resultant
    # against its minimal polynomial, then keep the candidates that are roots.
    distinct: List[AlgebraicReal] = []
    symbols = []
    expr = sympy.Integer(0)
    for i, v in enumerate(values):
        if v.is_rational:
            term = to_sympy_rational(v.to_fraction())
        else:
            for j, seen in enumerate(distinct):
                if seen == v:
                    term = symbols[j]
                    break
            else:
                distinct.append(v)
                symbols.append(sympy.Symbol(f'u{len(symbols)}'))
                term = symbols[-1]
        expr += term * _T ** i
    norm = sympy.expand(expr)
    for symbol, value in zip(symbols, distinct):
        norm = sympy.resultant(norm, value._expr(symbol), symbol)
    norm_poly = SymPoly(norm, _T, domain=QQ)
    if norm_poly.is_zero:
        raise DomainError("Vanishing norm polynomial")
    if norm_poly.degree() < 1:
        return []
    candidates = _isolate_rational(_coeffs_of(norm_poly))
    return [r for r in candidates if _evaluate(values, r).is_zero()]


def root_isolate(coeffs: Sequence[Scalar]) -> List[AlgebraicReal]:
    """
    All distinct real roots of a univariate polynomial, in increasing order.

    Args:
        coeffs: Coefficients from the constant term upwards; rational or
            AlgebraicReal.

    Returns:
        Sorted list of AlgebraicReal roots.
    """
    values = [as_real(c) for c in coeffs]
    while values and values[-1].is_zero():
        values.pop()
    if not values:
        raise DomainError("root_isolate of the zero polynomial")
    if len(values) == 1:
        return []
    if all(v.is_rational for v in values):
        return _isolate_rational([v.to_fraction() for v in values])
    return _isolate_algebraic(values)


def sturm_count(coeffs: Sequence[Union[int, Fraction]], lo: Optional[Fraction] = None,
                hi: Optional[Fraction] = None) -> int:
    """Number of distinct real roots in (lo, hi]; ``None`` bounds mean infinity."""
    values = _strip([Fraction(c) for c in coeffs])
    if not values:
        raise DomainError("sturm_count of the zero polynomial")
    if len(values) == 1:
        return 0
    chain = [SymPoly(s, _T, domain=QQ) for s in sympy.sturm(_sympy_poly(values))]
    return _variations(chain, lo, -1) - _variations(chain, hi, 1)


def _variations(chain: Sequence[SymPoly], x: Optional[Fraction], direction: int) -> int:
    signs = []
    for s in chain:
        if x is None:
            value = s.LC() * direction ** s.degree()
        else:
            value = s.eval(to_sympy_rational(x))
        if value != 0:
            signs.append(value > 0)
    return sum(1 for left, right in zip(signs, signs[1:]) if left != right)
