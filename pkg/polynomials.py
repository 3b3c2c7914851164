"""
Sparse multivariate polynomials over Q, rational functions, parametrized
polynomials Q(x)[y, z], sign conditions and rational maps.

Variables are addressed by position. Descriptors lay them out as
(b-block, a-block, c-block), i.e. (x_1..x_n, y_1..y_k, z_1..z_l).
Heavy lifting (cancellation, substitution) goes through sympy; everything
else stays on ``fractions.Fraction``.
"""
import logging
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy import Poly as SymPoly, QQ

from algebraic_real import AlgebraicReal, Scalar, as_real, format_rational, from_sympy_rational, to_sympy_rational
from errors import DimensionError, DomainError, GuardViolation
from monomial_order import OrderIndex, preceq

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]
Point = Tuple[AlgebraicReal, ...]


def make_point(values: Iterable[Scalar]) -> Point:
    return tuple(as_real(v) for v in values)


def _symbols(n: int):
    return tuple(sympy.Symbol(f'x{i}') for i in range(n))


class Poly:
    """Sparse polynomial in ``nvars`` variables with Fraction coefficients."""

    __slots__ = ('nvars', '_terms')

    def __init__(self, nvars: int, terms: Optional[Mapping[Exponents, Union[int, Fraction]]] = None):
        self.nvars = nvars
        cleaned: Dict[Exponents, Fraction] = {}
        for exponents, coeff in (terms or {}).items():
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != nvars:
                raise DimensionError(f"Exponent vector {exponents} has length != {nvars}")
            coeff = Fraction(coeff)
            if coeff:
                cleaned[exponents] = coeff
        self._terms = cleaned

    @classmethod
    def from_terms(cls, nvars: int, pairs: Iterable[Tuple[Exponents, Union[int, Fraction]]]) -> "Poly":
        acc: Dict[Exponents, Fraction] = {}
        for exponents, coeff in pairs:
            exponents = tuple(exponents)
            acc[exponents] = acc.get(exponents, Fraction(0)) + Fraction(coeff)
        return cls(nvars, acc)

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def constant(cls, value: Union[int, Fraction], nvars: int) -> "Poly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, index: int, nvars: int) -> "Poly":
        if not 0 <= index < nvars:
            raise DimensionError(f"Variable {index} out of range for {nvars} variables")
        exponents = [0] * nvars
        exponents[index] = 1
        return cls(nvars, {tuple(exponents): 1})

    # -- inspection --------------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponents, Fraction]:
        return MappingProxyType(self._terms)

    def sorted_terms(self) -> List[Tuple[Exponents, Fraction]]:
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise DomainError(f"{self} is not constant")
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def degree_in(self, index: int) -> int:
        return max((e[index] for e in self._terms), default=0)

    def variables(self) -> frozenset:
        return frozenset(i for e in self._terms for i, v in enumerate(e) if v)

    def leading_coefficient(self) -> Fraction:
        return self._terms[max(self._terms)] if self._terms else Fraction(0)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionError(f"Mixing {self.nvars}- and {other.nvars}-variable polynomials")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.constant(other, self.nvars)
        raise TypeError(f"Cannot combine Poly with {type(other).__name__}")

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        acc = dict(self._terms)
        for e, c in other._terms.items():
            acc[e] = acc.get(e, Fraction(0)) + c
        return Poly(self.nvars, acc)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        other = self._coerce(other)
        acc: Dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, Fraction(0)) + c1 * c2
        return Poly(self.nvars, acc)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise DomainError("Negative power of a polynomial")
        result = Poly.constant(1, self.nvars)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self._terms.items())))

    # -- evaluation --------------------------------------------------------

    def evaluate(self, point: Sequence[Scalar]) -> AlgebraicReal:
        if len(point) != self.nvars:
            raise DimensionError(f"Point of arity {len(point)} for {self.nvars}-variable polynomial")
        values = [as_real(v) for v in point]
        if all(v.is_rational for v in values):
            return AlgebraicReal.from_rational(self.evaluate_rational([v.to_fraction() for v in values]))
        total = AlgebraicReal.from_rational(0)
        powers: Dict[Tuple[int, int], AlgebraicReal] = {}
        for exponents, coeff in self.sorted_terms():
            term = AlgebraicReal.from_rational(coeff)
            for i, e in enumerate(exponents):
                if e:
                    if (i, e) not in powers:
                        powers[(i, e)] = values[i] ** e
                    term = term * powers[(i, e)]
            total = total + term
        return total

    def evaluate_rational(self, point: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for exponents, coeff in self._terms.items():
            term = coeff
            for v, e in zip(point, exponents):
                if e:
                    term *= v ** e
            total += term
        return total

    # -- variable manipulation ---------------------------------------------

    def remap(self, mapping: Sequence[int], nvars: int) -> "Poly":
        """Send variable i to variable mapping[i] of an ``nvars``-variable ring."""
        if len(mapping) != self.nvars:
            raise DimensionError(f"Mapping of length {len(mapping)} for {self.nvars} variables")
        acc: Dict[Exponents, Fraction] = {}
        for exponents, coeff in self._terms.items():
            target = [0] * nvars
            for i, e in enumerate(exponents):
                if e:
                    target[mapping[i]] += e
            key = tuple(target)
            acc[key] = acc.get(key, Fraction(0)) + coeff
        return Poly(nvars, acc)

    def insert_vars(self, position: int, count: int = 1) -> "Poly":
        mapping = [i if i < position else i + count for i in range(self.nvars)]
        return self.remap(mapping, self.nvars + count)

    def drop_var(self, index: int) -> "Poly":
        if index in self.variables():
            raise DimensionError(f"Variable {index} still occurs in {self}")
        mapping = [i if i < index else i - 1 for i in range(self.nvars)]
        mapping[index] = 0
        return self.remap(mapping, self.nvars - 1)

    def substitute(self, index: int, replacement: "Poly") -> "Poly":
        """Replace variable ``index`` by ``replacement`` (same ring)."""
        replacement = self._coerce(replacement)
        result = Poly.zero(self.nvars)
        cache: Dict[int, Poly] = {}
        for exponents, coeff in self._terms.items():
            e = exponents[index]
            rest = list(exponents)
            rest[index] = 0
            if e not in cache:
                cache[e] = replacement ** e
            result = result + Poly(self.nvars, {tuple(rest): coeff}) * cache[e]
        return result

    # -- sympy bridge ------------------------------------------------------

    def to_sympy(self, symbols: Optional[Sequence[sympy.Symbol]] = None):
        symbols = symbols or _symbols(self.nvars)
        expr = sympy.Integer(0)
        for exponents, coeff in self.sorted_terms():
            term = to_sympy_rational(coeff)
            for s, e in zip(symbols, exponents):
                term *= s ** e
            expr += term
        return expr

    @classmethod
    def from_sympy(cls, expr, symbols: Sequence[sympy.Symbol]) -> "Poly":
        nvars = len(symbols)
        if nvars == 0:
            return cls.constant(from_sympy_rational(expr), 0)
        sp = SymPoly(expr, *symbols, domain=QQ)
        return cls(nvars, {tuple(m): from_sympy_rational(c) for m, c in sp.terms()})

    def __repr__(self) -> str:
        return f"Poly({self.nvars}, {self})"

    def __str__(self) -> str:
        return format_poly(self)


def format_poly(p: Poly, names: Optional[Sequence[str]] = None) -> str:
    names = names or [f"x{i}" for i in range(p.nvars)]
    if p.is_zero():
        return "0"
    parts = []
    for exponents, coeff in sorted(p.terms.items(), reverse=True):
        factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, exponents) if e]
        if not factors:
            parts.append(format_rational(coeff))
        elif coeff == 1:
            parts.append("*".join(factors))
        elif coeff == -1:
            parts.append("-" + "*".join(factors))
        else:
            parts.append(format_rational(coeff) + "*" + "*".join(factors))
    return " + ".join(parts).replace("+ -", "- ")


class RatFunc:
    """Quotient of two polynomials, kept cancelled with a normalized denominator."""

    __slots__ = ('numer', 'denom')

    def __init__(self, numer: Poly, denom: Optional[Poly] = None):
        denom = denom if denom is not None else Poly.constant(1, numer.nvars)
        if denom.nvars != numer.nvars:
            raise DimensionError("Numerator and denominator live in different rings")
        if denom.is_zero():
            raise DomainError("Rational function with zero denominator")
        self.numer, self.denom = _normalize(numer, denom)

    @classmethod
    def constant(cls, value: Union[int, Fraction], nvars: int) -> "RatFunc":
        return cls(Poly.constant(value, nvars))

    @classmethod
    def variable(cls, index: int, nvars: int) -> "RatFunc":
        return cls(Poly.variable(index, nvars))

    @property
    def nvars(self) -> int:
        return self.numer.nvars

    def is_zero(self) -> bool:
        return self.numer.is_zero()

    def is_constant(self) -> bool:
        return self.numer.is_constant() and self.denom.is_constant()

    def is_polynomial(self) -> bool:
        return self.denom.is_constant()

    def constant_value(self) -> Fraction:
        return self.numer.constant_value() / self.denom.constant_value()

    def variables(self) -> frozenset:
        return self.numer.variables() | self.denom.variables()

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc(other)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return RatFunc.constant(other, self.nvars)
        raise TypeError(f"Cannot combine RatFunc with {type(other).__name__}")

    def __add__(self, other) -> "RatFunc":
        other = self._coerce(other)
        if self.denom == other.denom:
            return RatFunc(self.numer + other.numer, self.denom)
        return RatFunc(self.numer * other.denom + other.numer * self.denom, self.denom * other.denom)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.numer, self.denom)

    def __sub__(self, other) -> "RatFunc":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RatFunc":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RatFunc":
        other = self._coerce(other)
        return RatFunc(self.numer * other.numer, self.denom * other.denom)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFunc":
        other = self._coerce(other)
        if other.is_zero():
            raise DomainError("Division by the zero rational function")
        return RatFunc(self.numer * other.denom, self.denom * other.numer)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.numer == other.numer and self.denom == other.denom

    def __hash__(self) -> int:
        return hash((self.numer, self.denom))

    def evaluate(self, point: Sequence[Scalar]) -> AlgebraicReal:
        den = self.denom.evaluate(point)
        if den.is_zero():
            raise GuardViolation(make_point(point), f"denominator {self.denom} vanishes")
        if self.denom.is_constant():
            return self.numer.evaluate(point) * self.denom.constant_value() ** -1
        return self.numer.evaluate(point) / den

    def remap(self, mapping: Sequence[int], nvars: int) -> "RatFunc":
        return RatFunc(self.numer.remap(mapping, nvars), self.denom.remap(mapping, nvars))

    def insert_vars(self, position: int, count: int = 1) -> "RatFunc":
        return RatFunc(self.numer.insert_vars(position, count), self.denom.insert_vars(position, count))

    def substitute(self, index: int, replacement: "RatFunc") -> "RatFunc":
        """Compose with variable ``index`` replaced by ``replacement``."""
        symbols = _symbols(self.nvars)
        expr = (self.numer.to_sympy(symbols) / self.denom.to_sympy(symbols)).subs(
            symbols[index],
            replacement.numer.to_sympy(symbols) / replacement.denom.to_sympy(symbols),
        )
        numer, denom = sympy.fraction(sympy.cancel(sympy.together(expr)))
        return RatFunc(Poly.from_sympy(numer, symbols), Poly.from_sympy(denom, symbols))

    def __repr__(self) -> str:
        return f"RatFunc({self})"

    def __str__(self) -> str:
        if self.denom.is_constant() and self.denom.constant_value() == 1:
            return str(self.numer)
        return f"({self.numer})/({self.denom})"


def _normalize(numer: Poly, denom: Poly) -> Tuple[Poly, Poly]:
    nvars = numer.nvars
    if numer.is_zero():
        return numer, Poly.constant(1, nvars)
    if denom.is_constant():
        scale = denom.constant_value()
        return numer * (1 / scale), Poly.constant(1, nvars)
    symbols = _symbols(nvars)
    cancelled = sympy.cancel(numer.to_sympy(symbols) / denom.to_sympy(symbols))
    top, bottom = sympy.fraction(cancelled)
    numer, denom = Poly.from_sympy(top, symbols), Poly.from_sympy(bottom, symbols)
    scale = denom.leading_coefficient()
    return numer * (1 / scale), denom * (1 / scale)


class ParamPoly:
    """
    Polynomial sum of f_{i,j}(x) y^i z^j with rational-function coefficients.

    ``n`` counts the x variables and ``k`` the y variables; there is a single
    z. Coefficients are keyed by OrderIndex and the key set is the support.
    """

    __slots__ = ('n', 'k', '_coeffs')

    def __init__(self, n: int, k: int, coeffs: Optional[Mapping[OrderIndex, RatFunc]] = None):
        self.n = n
        self.k = k
        cleaned: Dict[OrderIndex, RatFunc] = {}
        for index, coeff in (coeffs or {}).items():
            if index.k != k:
                raise DimensionError(f"Index {index} does not have k={k}")
            if not isinstance(coeff, RatFunc):
                coeff = RatFunc(coeff) if isinstance(coeff, Poly) else RatFunc.constant(coeff, n)
            if coeff.nvars != n:
                raise DimensionError(f"Coefficient over {coeff.nvars} variables, expected {n}")
            if not coeff.is_zero():
                cleaned[index] = coeff
        self._coeffs = cleaned

    @classmethod
    def from_poly(cls, poly: Poly, n: int, k: int) -> "ParamPoly":
        """Split a polynomial over (x, y, z) into x-coefficients of (y, z)-monomials."""
        if poly.nvars != n + k + 1:
            raise DimensionError(f"Expected {n + k + 1} variables, got {poly.nvars}")
        grouped: Dict[OrderIndex, Dict[Exponents, Fraction]] = {}
        for exponents, coeff in poly.terms.items():
            index = OrderIndex.from_tuple(exponents[n:])
            grouped.setdefault(index, {})[exponents[:n]] = coeff
        return cls(n, k, {index: RatFunc(Poly(n, terms)) for index, terms in grouped.items()})

    @classmethod
    def constant(cls, value: Union[int, Fraction], n: int, k: int) -> "ParamPoly":
        return cls(n, k, {OrderIndex.zero(k): RatFunc.constant(value, n)})

    @classmethod
    def monomial(cls, index: OrderIndex, coeff: RatFunc) -> "ParamPoly":
        return cls(coeff.nvars, index.k, {index: coeff})

    # -- inspection --------------------------------------------------------

    @property
    def coeffs(self) -> Mapping[OrderIndex, RatFunc]:
        return MappingProxyType(self._coeffs)

    def coeff(self, index: OrderIndex) -> RatFunc:
        return self._coeffs.get(index, RatFunc.constant(0, self.n))

    def support(self) -> Tuple[OrderIndex, ...]:
        """Support indices in increasing order."""
        return tuple(sorted(self._coeffs, key=OrderIndex.sort_key))

    def is_zero(self) -> bool:
        return not self._coeffs

    def leading_support(self) -> Tuple[frozenset, OrderIndex]:
        if self.is_zero():
            raise DomainError("The zero polynomial has no leading index")
        support = self.support()
        return frozenset(support), support[-1]

    @property
    def z_degree(self) -> int:
        return max((index.z_degree for index in self._coeffs), default=0)

    def x_variables(self) -> frozenset:
        return frozenset().union(*(c.variables() for c in self._coeffs.values()))

    def y_variables(self) -> frozenset:
        return frozenset(i for index in self._coeffs for i, e in enumerate(index.exponents) if e)

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "ParamPoly") -> None:
        if (self.n, self.k) != (other.n, other.k):
            raise DimensionError(f"Mixing ParamPoly({self.n},{self.k}) with ({other.n},{other.k})")

    def __add__(self, other: "ParamPoly") -> "ParamPoly":
        self._check(other)
        acc = dict(self._coeffs)
        for index, coeff in other._coeffs.items():
            acc[index] = acc[index] + coeff if index in acc else coeff
        return ParamPoly(self.n, self.k, acc)

    def __neg__(self) -> "ParamPoly":
        return ParamPoly(self.n, self.k, {i: -c for i, c in self._coeffs.items()})

    def __sub__(self, other: "ParamPoly") -> "ParamPoly":
        return self + (-other)

    def __mul__(self, other: "ParamPoly") -> "ParamPoly":
        self._check(other)
        acc: Dict[OrderIndex, RatFunc] = {}
        for i1, c1 in self._coeffs.items():
            for i2, c2 in other._coeffs.items():
                index = OrderIndex(
                    tuple(a + b for a, b in zip(i1.exponents, i2.exponents)),
                    i1.z_degree + i2.z_degree,
                )
                acc[index] = acc[index] + c1 * c2 if index in acc else c1 * c2
        return ParamPoly(self.n, self.k, acc)

    def scale(self, factor: RatFunc) -> "ParamPoly":
        return ParamPoly(self.n, self.k, {i: c * factor for i, c in self._coeffs.items()})

    def __pow__(self, exponent: int) -> "ParamPoly":
        result = ParamPoly.constant(1, self.n, self.k)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParamPoly):
            return NotImplemented
        return (self.n, self.k) == (other.n, other.k) and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.n, self.k, frozenset(self._coeffs.items())))

    def divide_by(self, index: OrderIndex) -> Tuple["ParamPoly", RatFunc]:
        """
        Divide every coefficient by f_index.

        Returns:
            The quotient (coefficient exactly 1 at ``index``) and the guard
            f_index, which must be non-zero wherever the quotient is used.
        """
        divisor = self.coeff(index)
        if divisor.is_zero():
            raise DomainError(f"Division by the zero coefficient at {index}")
        quotient = {i: c / divisor for i, c in self._coeffs.items()}
        return ParamPoly(self.n, self.k, quotient), divisor

    def truncate(self, index: OrderIndex) -> "ParamPoly":
        """Keep only the terms whose index is <= ``index``."""
        return ParamPoly(self.n, self.k, {i: c for i, c in self._coeffs.items() if preceq(i, index)})

    # -- evaluation --------------------------------------------------------

    def z_coefficients(self, b: Sequence[Scalar], a: Sequence[Scalar]) -> List[AlgebraicReal]:
        """Coefficients of the univariate polynomial p(b, a, z), constant term first."""
        if len(b) != self.n or len(a) != self.k:
            raise DimensionError(f"Point ({len(b)}, {len(a)}) for ParamPoly({self.n},{self.k})")
        a_values = [as_real(v) for v in a]
        result = [AlgebraicReal.from_rational(0)] * (self.z_degree + 1)
        for index, coeff in self._coeffs.items():
            value = coeff.evaluate(b)
            for v, e in zip(a_values, index.exponents):
                if e:
                    value = value * v ** e
            result[index.z_degree] = result[index.z_degree] + value
        return result

    def vanishes_at(self, b: Sequence[Scalar], a: Sequence[Scalar]) -> bool:
        """True iff p(b, a, -) is the zero polynomial."""
        return all(c.is_zero() for c in self.z_coefficients(b, a))

    def specialize(self, b: Sequence[Union[int, Fraction]]) -> Poly:
        """The polynomial in (y, z) obtained at a rational point b."""
        values = [Fraction(v) for v in b]
        terms = {}
        for index, coeff in self._coeffs.items():
            value = coeff.evaluate(values)
            if not value.is_zero():
                terms[index.as_tuple()] = value.to_fraction()
        return Poly(self.k + 1, terms)

    # -- variable manipulation ---------------------------------------------

    def remap_x(self, mapping: Sequence[int], n: int) -> "ParamPoly":
        return ParamPoly(n, self.k, {i: c.remap(mapping, n) for i, c in self._coeffs.items()})

    def embed_x(self, offset: int, n: int) -> "ParamPoly":
        """Place the x block at ``offset`` inside a block of ``n`` variables."""
        return self.remap_x([offset + i for i in range(self.n)], n)

    def insert_params(self, position: int, count: int = 1) -> "ParamPoly":
        """Add ``count`` unused y variables before y_position."""
        moved = {}
        for index, coeff in self._coeffs.items():
            e = index.exponents
            moved[OrderIndex(e[:position] + (0,) * count + e[position:], index.z_degree)] = coeff
        return ParamPoly(self.n, self.k + count, moved)

    def drop_param(self, position: int) -> "ParamPoly":
        if position in self.y_variables():
            raise DimensionError(f"y{position} still occurs")
        moved = {}
        for index, coeff in self._coeffs.items():
            e = index.exponents
            moved[OrderIndex(e[:position] + e[position + 1:], index.z_degree)] = coeff
        return ParamPoly(self.n, self.k - 1, moved)

    def substitute_param(self, position: int, replacement: "ParamPoly") -> "ParamPoly":
        """
        Replace y_position by ``replacement`` and drop that variable.

        The replacement must be free of z and of y_position itself.
        """
        self._check(replacement)
        if replacement.z_degree > 0 or position in replacement.y_variables():
            raise DomainError("Replacement must not involve z or the substituted variable")
        result = ParamPoly(self.n, self.k)
        powers: Dict[int, ParamPoly] = {}
        for index, coeff in self._coeffs.items():
            e = index.exponents[position]
            rest = list(index.exponents)
            rest[position] = 0
            if e not in powers:
                powers[e] = replacement ** e
            base = ParamPoly(self.n, self.k, {OrderIndex(tuple(rest), index.z_degree): coeff})
            result = result + base * powers[e]
        return result.drop_param(position)

    def substitute_x(self, index: int, replacement: RatFunc) -> "ParamPoly":
        return ParamPoly(self.n, self.k, {i: c.substitute(index, replacement) for i, c in self._coeffs.items()})

    def coefficient_equations(self) -> Dict[int, Dict[Exponents, RatFunc]]:
        """Group coefficients by z-degree: p(x, y, -) == 0 iff every group sums to 0."""
        groups: Dict[int, Dict[Exponents, RatFunc]] = {}
        for index, coeff in self._coeffs.items():
            groups.setdefault(index.z_degree, {})[index.exponents] = coeff
        return groups

    def __repr__(self) -> str:
        return f"ParamPoly(n={self.n}, k={self.k}, {self})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for index in reversed(self.support()):
            coeff = self._coeffs[index]
            monomial = "*".join(
                [f"y{i}" if e == 1 else f"y{i}^{e}" for i, e in enumerate(index.exponents) if e]
                + ([] if index.z_degree == 0 else ["z" if index.z_degree == 1 else f"z^{index.z_degree}"])
            )
            parts.append(f"({coeff})" + (f"*{monomial}" if monomial else ""))
        return " + ".join(parts)


class Relation(str, Enum):
    """Sign relation of a polynomial against zero."""

    EQ = '='
    NE = '!='
    GT = '>'
    GE = '>='
    LT = '<'
    LE = '<='

    def test(self, sign: int) -> bool:
        return {
            Relation.EQ: sign == 0,
            Relation.NE: sign != 0,
            Relation.GT: sign > 0,
            Relation.GE: sign >= 0,
            Relation.LT: sign < 0,
            Relation.LE: sign <= 0,
        }[self]


class Condition:
    """``poly relation 0`` over a fixed variable layout."""

    __slots__ = ('poly', 'relation')

    def __init__(self, poly: Poly, relation: Union[Relation, str]):
        self.poly = poly
        self.relation = Relation(relation)

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    def holds(self, point: Sequence[Scalar]) -> bool:
        return self.relation.test(self.poly.evaluate(point).sign())

    def remap(self, mapping: Sequence[int], nvars: int) -> "Condition":
        return Condition(self.poly.remap(mapping, nvars), self.relation)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Condition):
            return NotImplemented
        return self.poly == other.poly and self.relation == other.relation

    def __hash__(self) -> int:
        return hash((self.poly, self.relation))

    def __repr__(self) -> str:
        return f"Condition({self.poly} {self.relation.value} 0)"


def guard_conditions(guard: RatFunc) -> Tuple[Condition, ...]:
    """A non-vanishing guard as sign conditions on its numerator and denominator."""
    conditions = [Condition(guard.numer, Relation.NE)]
    if not guard.denom.is_constant():
        conditions.append(Condition(guard.denom, Relation.NE))
    return tuple(conditions)


class PolyMap:
    """A tuple of rational functions in ``n_in`` variables."""

    __slots__ = ('n_in', 'components')

    def __init__(self, n_in: int, components: Sequence[RatFunc]):
        self.n_in = n_in
        self.components = tuple(components)
        for c in self.components:
            if c.nvars != n_in:
                raise DimensionError(f"Map component over {c.nvars} variables, expected {n_in}")

    @classmethod
    def identity(cls, n: int) -> "PolyMap":
        return cls(n, [RatFunc.variable(i, n) for i in range(n)])

    @classmethod
    def projection(cls, indices: Sequence[int], n: int) -> "PolyMap":
        return cls(n, [RatFunc.variable(i, n) for i in indices])

    @classmethod
    def graph(cls, f: "PolyMap") -> "PolyMap":
        """x -> (x, f(x))."""
        return cls(f.n_in, list(cls.identity(f.n_in).components) + list(f.components))

    @property
    def n_out(self) -> int:
        return len(self.components)

    def apply(self, point: Sequence[Scalar]) -> Point:
        if len(point) != self.n_in:
            raise DimensionError(f"Map expects {self.n_in} coordinates, got {len(point)}")
        return tuple(c.evaluate(point) for c in self.components)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.n_in == other.n_in and self.components == other.components

    def __hash__(self) -> int:
        return hash((self.n_in, self.components))

    def __repr__(self) -> str:
        return f"PolyMap({self.n_in} -> {self.n_out}: {', '.join(map(str, self.components))})"
