"""
Rays from the origin in the plane with exact orientation tests.

A ray is either an integral primitive vector or, when its slope is irrational,
sign * (1, slope) with the slope a RealAlgebraic.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Mapping, Sequence

import sympy

from cy3_bounds.algebra.forms import DivisorClass
from cy3_bounds.algebra.real_algebraic import (
    PreconditionError,
    RealAlgebraic,
    compare,
    evaluate,
)
from cy3_bounds.entities import DomainError

logger = logging.getLogger(__name__)


class ZeroRayError(DomainError):
    pass


def _sign(value) -> int:
    return (value > 0) - (value < 0)


def primitive_vector(x: Fraction | int, y: Fraction | int) -> tuple[int, int]:
    x, y = Fraction(x), Fraction(y)
    if x == 0 and y == 0:
        raise ZeroRayError("the zero vector spans no ray")
    scale = x.denominator * y.denominator
    xi, yi = int(x * scale), int(y * scale)
    g = gcd(xi, yi)
    return xi // g, yi // g


@dataclass(frozen=True, eq=False)
class Ray2:
    vector: tuple[int, int] | None = None
    sign: int = 1
    slope: RealAlgebraic | None = None

    @classmethod
    def integral(cls, x: Fraction | int, y: Fraction | int) -> "Ray2":
        return cls(vector=primitive_vector(x, y))

    @classmethod
    def of_class(cls, D: DivisorClass) -> "Ray2":
        return cls.integral(*D.coords)

    @classmethod
    def sloped(cls, sign: int, slope: RealAlgebraic) -> "Ray2":
        """The ray through sign * (1, slope)."""
        if sign not in (1, -1):
            raise PreconditionError("sign must be 1 or -1")
        if slope.is_rational:
            return cls.integral(sign, sign * slope.value)
        return cls(sign=sign, slope=slope)

    @property
    def is_integral(self) -> bool:
        return self.vector is not None

    @property
    def chart(self) -> str:
        return "axis" if self.is_integral else "sloped"

    def coordinates(self, symbol: sympy.Symbol) -> tuple[tuple, dict]:
        """
        Representative coordinates as sympy expressions with their bindings.
        """
        if self.is_integral:
            return (sympy.Integer(self.vector[0]), sympy.Integer(self.vector[1])), {}
        return (sympy.Integer(self.sign), self.sign * symbol), {symbol: self.slope}

    def negated(self) -> "Ray2":
        if self.is_integral:
            return Ray2(vector=(-self.vector[0], -self.vector[1]))
        return Ray2(sign=-self.sign, slope=self.slope)

    def __neg__(self) -> "Ray2":
        return self.negated()

    def _y_sign(self) -> int:
        if self.is_integral:
            return _sign(self.vector[1])
        return self.sign * self.slope.sign()

    def _x_sign(self) -> int:
        if self.is_integral:
            return _sign(self.vector[0])
        return self.sign

    def half(self) -> int:
        """0 for angles in [0, pi), 1 for [pi, 2 pi)."""
        y = self._y_sign()
        return 0 if y > 0 or (y == 0 and self._x_sign() > 0) else 1

    def direction(self, precision: Fraction) -> tuple[Fraction, Fraction]:
        """Rational direction vector, exact for integral rays."""
        if self.is_integral:
            return Fraction(self.vector[0]), Fraction(self.vector[1])
        t = self.slope.approximation(precision)
        return Fraction(self.sign), self.sign * t

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ray2):
            return NotImplemented
        if self.is_integral or other.is_integral:
            return self.vector == other.vector
        return self.sign == other.sign and self.slope == other.slope

    def __hash__(self) -> int:
        if self.is_integral:
            return hash(self.vector)
        return hash((self.sign, self.slope))

    def __repr__(self) -> str:
        if self.is_integral:
            return f"Ray2{self.vector}"
        return f"Ray2({self.sign}*(1, {self.slope!r}))"


def cross_sign(u: Ray2, v: Ray2) -> int:
    """Sign of u_x v_y - u_y v_x."""
    if u.is_integral and v.is_integral:
        (a, b), (c, d) = u.vector, v.vector
        return _sign(a * d - b * c)
    if u.is_integral:
        a, b = u.vector
        # s (a t - b)
        if a == 0:
            return v.sign * _sign(-b)
        return v.sign * _sign(a) * compare(v.slope, RealAlgebraic.from_rational(Fraction(b, a)))
    if v.is_integral:
        return -cross_sign(v, u)
    return u.sign * v.sign * compare(v.slope, u.slope)


def vector_cross_sign(u: Ray2, x: tuple[int, int]) -> int:
    return cross_sign(u, Ray2.integral(*x))


def compare_angle(u: Ray2, v: Ray2) -> int:
    """Counterclockwise order of angles in [0, 2 pi) measured from (1, 0)."""
    hu, hv = u.half(), v.half()
    if hu != hv:
        return -1 if hu < hv else 1
    return -cross_sign(u, v)


def sort_ccw(rays: Sequence[Ray2]) -> list[Ray2]:
    return sorted(rays, key=cmp_to_key(compare_angle))


def unique_rays(rays: Sequence[Ray2]) -> list[Ray2]:
    result = []
    for ray in rays:
        if not any(ray == seen for seen in result):
            result.append(ray)
    return result


def rational_between(u: Ray2, v: Ray2) -> Ray2:
    """
    An integral ray strictly inside the counterclockwise sector from u to v,
    which must span an angle strictly between 0 and pi.
    """
    if cross_sign(u, v) <= 0:
        raise PreconditionError("sector is not salient")
    k = 4
    while True:
        precision = Fraction(1, 2 ** k)
        ux, uy = u.direction(precision)
        vx, vy = v.direction(precision)
        candidate = Ray2.integral(ux + vx, uy + vy)
        if cross_sign(u, candidate) > 0 and cross_sign(candidate, v) > 0:
            return candidate
        k += 4


def ray_from_coordinates(x, y, bindings: Mapping[sympy.Symbol, RealAlgebraic]) -> Ray2:
    """
    The ray through the point (x, y) given as expressions in bound algebraic symbols.
    """
    x_value = evaluate(x, bindings)
    x_sign = x_value.sign()
    if x_sign == 0:
        y_sign = evaluate(y, bindings).sign()
        if y_sign == 0:
            raise ZeroRayError("the zero vector spans no ray")
        return Ray2.integral(0, y_sign)
    slope = evaluate(sympy.Mul(y, sympy.Pow(x, -1)), bindings)
    return Ray2.sloped(x_sign, slope)
