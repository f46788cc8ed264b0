"""
Exact real algebraic numbers.

A number is kept as an irreducible integer polynomial (ascending coefficients)
together with a rational isolating interval. Rationals use a linear polynomial
and a degenerate interval. All decisions are exact: Sturm counts for isolation,
bisection for refinement, resultants for evaluating expressions.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from math import floor, isqrt
from typing import Mapping, Sequence

import sympy
from sympy import Poly

from cy3_bounds.entities import DomainError

logger = logging.getLogger(__name__)

_X = sympy.Symbol("x")
_MAX_REFINEMENTS = 400


class ZeroPolynomialError(DomainError):
    pass


class PreconditionError(DomainError):
    pass


class RationalLambdaError(DomainError):
    pass


class RelevantSearchExhaustedError(DomainError):
    pass


def to_sympy_rational(value: int | Fraction) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def from_sympy_rational(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def _poly(coeffs: Sequence[int | Fraction]) -> Poly:
    return Poly([to_sympy_rational(c) for c in reversed(coeffs)], _X, domain="QQ")


def primitive_coefficients(poly: Poly) -> tuple[int, ...]:
    """
    Normalizes a univariate polynomial to integer, content-free coefficients
    with positive leading coefficient.
    :return: ascending coefficient tuple
    """
    if poly.is_zero:
        raise ZeroPolynomialError("polynomial is identically zero")
    _, integral = poly.clear_denoms(convert=True)
    _, integral = integral.primitive()
    if integral.LC() < 0:
        integral = -integral
    return tuple(int(c) for c in reversed(integral.all_coeffs()))


def evaluate_at(coeffs: Sequence[int | Fraction], x: Fraction) -> Fraction:
    value = Fraction(0)
    for c in reversed(coeffs):
        value = value * x + c
    return value


def _sign(value: Fraction | int) -> int:
    return (value > 0) - (value < 0)


@lru_cache(maxsize=4096)
def _sturm_chain(coeffs: tuple[int, ...]) -> tuple[tuple[Fraction, ...], ...]:
    chain = sympy.sturm(_poly(coeffs))
    return tuple(
        tuple(from_sympy_rational(c) for c in reversed(p.all_coeffs())) for p in chain
    )


def _variations(chain: tuple[tuple[Fraction, ...], ...], x: Fraction) -> int:
    signs = [s for s in (_sign(evaluate_at(p, x)) for p in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(coeffs: Sequence[int | Fraction], lo: Fraction, hi: Fraction) -> int:
    """
    Number of distinct real roots in the closed interval [lo, hi].
    """
    poly = _poly(coeffs)
    if poly.is_zero:
        raise ZeroPolynomialError("polynomial is identically zero")
    if lo > hi:
        return 0
    poly = poly.sqf_part()
    count = 0
    for end in sorted({lo, hi}):
        if poly.eval(to_sympy_rational(end)) == 0:
            count += 1
            poly = poly.quo(Poly(_X - to_sympy_rational(end), _X, domain="QQ"))
    if lo == hi or poly.degree() <= 0:
        return count
    chain = _sturm_chain(primitive_coefficients(poly))
    return count + _variations(chain, lo) - _variations(chain, hi)


def _cauchy_bound(coeffs: Sequence[int]) -> Fraction:
    lead = abs(coeffs[-1])
    return 1 + max(Fraction(abs(c), lead) for c in coeffs[:-1])


def _isolate(coeffs: tuple[int, ...], lo: Fraction, hi: Fraction) -> list[tuple[Fraction, Fraction]]:
    chain = _sturm_chain(coeffs)
    stack = [(lo, hi)]
    intervals = []
    while stack:
        a, b = stack.pop()
        roots = _variations(chain, a) - _variations(chain, b)
        if roots == 0:
            continue
        if roots == 1:
            intervals.append((a, b))
            continue
        mid = (a + b) / 2
        stack.append((a, mid))
        stack.append((mid, b))
    return intervals


@dataclass(frozen=True, eq=False)
class RealAlgebraic:
    poly: tuple[int, ...]
    lo: Fraction
    hi: Fraction

    @classmethod
    def from_rational(cls, value: int | Fraction) -> "RealAlgebraic":
        value = Fraction(value)
        return cls((-value.numerator, value.denominator), value, value)

    @classmethod
    def from_factor(cls, coeffs: tuple[int, ...], lo: Fraction, hi: Fraction) -> "RealAlgebraic":
        if len(coeffs) == 2:
            return cls.from_rational(Fraction(-coeffs[0], coeffs[1]))
        return cls(coeffs, Fraction(lo), Fraction(hi))

    @classmethod
    def from_isolating_interval(
            cls, coeffs: Sequence[int], lo: Fraction, hi: Fraction) -> "RealAlgebraic":
        """
        Selects the unique root of `coeffs` in the closed interval [lo, hi].
        """
        inside = [
            r for r in isolate_real_roots(coeffs)
            if compare(r, cls.from_rational(lo)) >= 0 and compare(r, cls.from_rational(hi)) <= 0
        ]
        if len(inside) != 1:
            raise PreconditionError(
                f"expected exactly one root in [{lo}, {hi}], found {len(inside)}"
            )
        return inside[0]

    @property
    def is_rational(self) -> bool:
        return len(self.poly) == 2

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @property
    def value(self) -> Fraction:
        if not self.is_rational:
            raise PreconditionError("value is irrational")
        return Fraction(-self.poly[0], self.poly[1])

    def as_expr(self, symbol: sympy.Symbol) -> sympy.Expr:
        return sum(c * symbol ** i for i, c in enumerate(self.poly))

    def refined(self) -> "RealAlgebraic":
        if self.is_rational:
            return self
        mid = (self.lo + self.hi) / 2
        if _sign(evaluate_at(self.poly, mid)) == _sign(evaluate_at(self.poly, self.lo)):
            return RealAlgebraic(self.poly, mid, self.hi)
        return RealAlgebraic(self.poly, self.lo, mid)

    def refined_to(self, width: Fraction) -> "RealAlgebraic":
        current = self
        while current.hi - current.lo > width:
            current = current.refined()
        return current

    def approximation(self, precision: Fraction) -> Fraction:
        refined = self.refined_to(precision)
        return (refined.lo + refined.hi) / 2

    def __float__(self) -> float:
        return float(self.approximation(Fraction(1, 2 ** 60)))

    def separated_from(self, q: Fraction) -> "RealAlgebraic":
        """Refines an irrational number until q lies outside its interval."""
        current = self
        while current.lo <= q <= current.hi:
            current = current.refined()
        return current

    def sign(self) -> int:
        if self.is_rational:
            return _sign(self.value)
        return 1 if self.separated_from(Fraction(0)).lo > 0 else -1

    def floor_multiple(self, m: int) -> int:
        """floor(m * self), exact."""
        if self.is_rational:
            return floor(m * self.value)
        current = self
        while floor(m * current.lo) != floor(m * current.hi):
            current = current.refined()
        return floor(m * current.lo)

    def __neg__(self) -> "RealAlgebraic":
        if self.is_rational:
            return RealAlgebraic.from_rational(-self.value)
        coeffs = [c if i % 2 == 0 else -c for i, c in enumerate(self.poly)]
        return RealAlgebraic(primitive_coefficients(_poly(coeffs)), -self.hi, -self.lo)

    def scaled(self, q: int | Fraction) -> "RealAlgebraic":
        q = Fraction(q)
        if q == 0:
            return RealAlgebraic.from_rational(0)
        if self.is_rational:
            return RealAlgebraic.from_rational(q * self.value)
        coeffs = primitive_coefficients(_poly([Fraction(c) / q ** i for i, c in enumerate(self.poly)]))
        lo, hi = sorted((q * self.lo, q * self.hi))
        return RealAlgebraic(coeffs, lo, hi)

    def shifted(self, q: int | Fraction) -> "RealAlgebraic":
        q = Fraction(q)
        if self.is_rational:
            return RealAlgebraic.from_rational(self.value + q)
        moved = _poly(self.poly).compose(Poly(_X - to_sympy_rational(q), _X, domain="QQ"))
        return RealAlgebraic(primitive_coefficients(moved), self.lo + q, self.hi + q)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.shifted(other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.shifted(-Fraction(other))
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scaled(other)
        return NotImplemented

    __rmul__ = __mul__

    def sqrt(self) -> "RealAlgebraic":
        if self.sign() < 0:
            raise PreconditionError("square root of a negative number")
        if self.is_rational:
            v = self.value
            rn, rd = isqrt(v.numerator), isqrt(v.denominator)
            if rn * rn == v.numerator and rd * rd == v.denominator:
                return RealAlgebraic.from_rational(Fraction(rn, rd))
        # the k-th positive root of p is the square of the k-th positive root of p(y^2)
        positive = [r for r in isolate_real_roots(self.poly) if r.sign() > 0]
        index = next(i for i, r in enumerate(positive) if r == self)
        squared = [0] * (2 * len(self.poly) - 1)
        for i, c in enumerate(self.poly):
            squared[2 * i] = c
        roots = [r for r in isolate_real_roots(squared) if r.sign() > 0]
        return roots[index]

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RealAlgebraic.from_rational(other)
        if not isinstance(other, RealAlgebraic):
            return NotImplemented
        return compare(self, other) == 0

    def __hash__(self) -> int:
        return hash(self.poly)

    def __lt__(self, other) -> bool:
        return compare(self, _coerce(other)) < 0

    def __le__(self, other) -> bool:
        return compare(self, _coerce(other)) <= 0

    def __gt__(self, other) -> bool:
        return compare(self, _coerce(other)) > 0

    def __ge__(self, other) -> bool:
        return compare(self, _coerce(other)) >= 0

    def __repr__(self) -> str:
        if self.is_rational:
            return f"RealAlgebraic({self.value})"
        return f"RealAlgebraic(root of {list(self.poly)} in [{self.lo}, {self.hi}])"


def _coerce(value) -> RealAlgebraic:
    if isinstance(value, RealAlgebraic):
        return value
    return RealAlgebraic.from_rational(value)


def _compare_with_rational(a: RealAlgebraic, q: Fraction) -> int:
    separated = a.separated_from(q)
    return 1 if separated.lo > q else -1


def _same_root(a: RealAlgebraic, b: RealAlgebraic) -> bool:
    common = sympy.gcd(_poly(a.poly), _poly(b.poly))
    if common.degree() < 1:
        return False
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo > hi:
        return False
    return count_real_roots(primitive_coefficients(common), lo, hi) > 0


def compare(a: RealAlgebraic, b: RealAlgebraic) -> int:
    """
    Exact three-way comparison.
    :return: -1, 0 or 1
    """
    if a.is_rational and b.is_rational:
        return _sign(a.value - b.value)
    if a.is_rational:
        return -_compare_with_rational(b, a.value)
    if b.is_rational:
        return _compare_with_rational(a, b.value)
    if _same_root(a, b):
        return 0
    while not (a.hi < b.lo or b.hi < a.lo):
        a, b = a.refined(), b.refined()
    return -1 if a.hi < b.lo else 1


def sign_at(coeffs: Sequence[int | Fraction], a: RealAlgebraic) -> int:
    """Exact sign of the polynomial `coeffs` at `a`."""
    if all(c == 0 for c in coeffs):
        return 0
    if a.is_rational:
        return _sign(evaluate_at(coeffs, a.value))
    common = sympy.gcd(_poly(coeffs), _poly(a.poly))
    if common.degree() >= 1 and count_real_roots(primitive_coefficients(common), a.lo, a.hi) > 0:
        return 0
    current = a
    while count_real_roots(coeffs, current.lo, current.hi) > 0:
        current = current.refined()
    return _sign(evaluate_at(coeffs, current.lo))


def isolate_real_roots(coeffs: Sequence[int | Fraction]) -> list[RealAlgebraic]:
    """
    All distinct real roots, ascending, each with a certified isolating interval.
    """
    poly = _poly(coeffs)
    if poly.is_zero:
        raise ZeroPolynomialError("polynomial is identically zero")
    if poly.degree() == 0:
        return []
    roots = []
    _, factors = poly.factor_list()
    for factor, _ in factors:
        irreducible = primitive_coefficients(factor)
        if len(irreducible) == 2:
            roots.append(RealAlgebraic.from_factor(irreducible, 0, 0))
            continue
        bound = _cauchy_bound(irreducible)
        roots.extend(
            RealAlgebraic(irreducible, lo, hi) for lo, hi in _isolate(irreducible, -bound, bound)
        )
    return sorted(roots, key=cmp_to_key(compare))


def _interval_mul(a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    products = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
    return min(products), max(products)


def _interval_pow(box: tuple[Fraction, Fraction], k: int) -> tuple[Fraction, Fraction]:
    lo, hi = box
    if k == 0:
        return Fraction(1), Fraction(1)
    if k % 2 == 1 or lo >= 0:
        return lo ** k, hi ** k
    if hi <= 0:
        return hi ** k, lo ** k
    return Fraction(0), max(lo ** k, hi ** k)


def _interval_eval(poly: Poly, boxes: list[tuple[Fraction, Fraction]]) -> tuple[Fraction, Fraction]:
    lo, hi = Fraction(0), Fraction(0)
    for monom, coeff in poly.terms():
        term = (from_sympy_rational(coeff), from_sympy_rational(coeff))
        for box, k in zip(boxes, monom):
            term = _interval_mul(term, _interval_pow(box, k))
        lo, hi = lo + term[0], hi + term[1]
    return lo, hi


def evaluate(expr, bindings: Mapping[sympy.Symbol, RealAlgebraic]) -> RealAlgebraic:
    """
    Exact value of a rational function of finitely many real algebraic numbers.

    :param expr: sympy expression with rational coefficients
    :param bindings: value of every free symbol of `expr`
    :return: the value as a RealAlgebraic
    """
    expr = sympy.sympify(expr)
    rational = {s: to_sympy_rational(v.value) for s, v in bindings.items() if v.is_rational}
    expr = sympy.together(expr.subs(rational))
    symbols = sorted(expr.free_symbols, key=lambda s: s.name)
    missing = [s for s in symbols if s not in bindings]
    if missing:
        raise PreconditionError(f"unbound symbols {missing}")
    num, den = sympy.fraction(expr)
    if not symbols:
        if den == 0:
            raise PreconditionError("division by zero")
        return RealAlgebraic.from_rational(from_sympy_rational(num / den))

    y = sympy.Dummy("y")
    eliminant = sympy.expand(den * y - num)
    for s in symbols:
        eliminant = sympy.resultant(eliminant, bindings[s].as_expr(s), s)
    eliminant = Poly(eliminant, y, domain="QQ")
    if eliminant.is_zero or eliminant.degree() < 1:
        raise PreconditionError("expression is undefined at the given point")
    factors = [primitive_coefficients(f) for f, _ in eliminant.factor_list()[1] if f.degree() > 0]

    num_poly = Poly(num, *symbols, domain="QQ")
    den_poly = Poly(den, *symbols, domain="QQ")
    current = [bindings[s] for s in symbols]
    for _ in range(_MAX_REFINEMENTS):
        boxes = [(v.lo, v.hi) for v in current]
        den_lo, den_hi = _interval_eval(den_poly, boxes)
        if not (den_lo <= 0 <= den_hi):
            num_box = _interval_eval(num_poly, boxes)
            lo, hi = _interval_mul(num_box, (1 / den_hi, 1 / den_lo))
            hits = []
            for factor in factors:
                found = count_real_roots(factor, lo, hi)
                hits.extend([factor] * found)
            if len(hits) == 1:
                factor = hits[0]
                if len(factor) == 2:
                    return RealAlgebraic.from_factor(factor, lo, hi)
                return RealAlgebraic(factor, lo, hi)
        current = [v.refined() for v in current]
    raise PreconditionError("could not isolate the value of the expression")


@dataclass(frozen=True)
class RelevantCertificate:
    """Certifies floor(m*lam) = floor and frac(m*lam) < frac_upper <= mu0."""
    m: int
    floor: int
    frac_upper: Fraction

    @property
    def ceil(self) -> int:
        return self.floor + 1


def relevant_m_certificates(
        lam: RealAlgebraic, mu0: Fraction, m_cap: int) -> list[RelevantCertificate]:
    if lam.is_rational:
        raise RationalLambdaError("lambda is rational; use the integral threshold instead")
    if not (0 < mu0 < 1):
        raise PreconditionError(f"mu0 must lie in (0, 1), got {mu0}")
    if lam.sign() <= 0:
        raise PreconditionError("lambda must be positive")
    certificates = []
    current = lam
    for m in range(1, m_cap + 1):
        while True:
            lo, hi = m * current.lo, m * current.hi
            base = floor(lo)
            if floor(hi) == base:
                if hi - base <= mu0:
                    certificates.append(RelevantCertificate(m, base, hi - base))
                    break
                if lo - base >= mu0:
                    break
            current = current.refined()
    logger.debug(f"{len(certificates)} relevant multiples up to {m_cap}")
    return certificates


def relevant_m_search(lam: RealAlgebraic, mu0: Fraction, m_cap: int) -> list[int]:
    """
    All m <= m_cap with frac(m * lam) < mu0, each decided exactly.
    """
    certificates = relevant_m_certificates(lam, mu0, m_cap)
    if not certificates:
        raise RelevantSearchExhaustedError(f"no relevant m up to {m_cap}")
    return [c.m for c in certificates]
