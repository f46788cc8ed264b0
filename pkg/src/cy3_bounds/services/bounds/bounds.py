"""
Riemann-Roch effectivity thresholds and the inequality scans built on them.
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from cy3_bounds.algebra.forms import (
    DivisorClass,
    LinearFormC2,
    TrilinearForm,
    c2_eval,
    cube,
    triple,
)
from cy3_bounds.algebra.real_algebraic import (
    PreconditionError,
    RationalLambdaError,
    RealAlgebraic,
    RelevantSearchExhaustedError,
    evaluate,
    relevant_m_certificates,
)
from cy3_bounds.entities import DomainError, FibrationBranch
from cy3_bounds.geometry.cone2 import Cone2
from cy3_bounds.services.surfaces.surfaces import EnumerationCapExceeded

logger = logging.getLogger(__name__)

EFFECTIVE_THRESHOLD = 24


class UnboundedEnumerationError(DomainError):
    pass


@dataclass(frozen=True)
class EffectivityResult:
    m: int | None
    chi_at_m: Fraction | None = None
    ceil_coeff: int | None = None


@dataclass(frozen=True)
class MovableCandidate:
    divisor: DivisorClass
    coefficients: tuple[int, ...]
    c2_value: int


def rr_chi(T: TrilinearForm, c: LinearFormC2, D: DivisorClass, m: int) -> Fraction:
    """chi(O(mD)) = m^3 D^3 / 6 + m c2.D / 12."""
    return Fraction(m ** 3) * cube(T, D) / 6 + Fraction(m * c2_eval(c, D), 12)


def effectivity_value(cube_value: Fraction | int, c2_value: int, m: int) -> Fraction:
    """2 m^3 D^3 + m c2.D, which is at least 24 exactly when chi(mD) >= 2."""
    return 2 * m ** 3 * cube_value + m * c2_value


def threshold_m(cube_value: Fraction | int, c2_value: int, m_cap: int) -> int | None:
    """Smallest m <= m_cap with 2 m^3 D^3 + m c2.D >= 24."""
    if cube_value == 0:
        if c2_value <= 0:
            return None
        m = -(-EFFECTIVE_THRESHOLD // c2_value)
        return m if m <= m_cap else None
    for m in range(1, m_cap + 1):
        if effectivity_value(cube_value, c2_value, m) >= EFFECTIVE_THRESHOLD:
            return m
        # with D^3 < 0 the value only decreases once 2 m^2 D^3 + c2.D <= 0
        if cube_value < 0 and 2 * m * m * cube_value + c2_value <= 0:
            return None
    return None


def min_effectivity_m(
        T: TrilinearForm, c: LinearFormC2, D: DivisorClass, m_cap: int) -> EffectivityResult:
    m = threshold_m(cube(T, D), c2_eval(c, D), m_cap)
    if m is None:
        return EffectivityResult(None)
    return EffectivityResult(m, rr_chi(T, c, D, m))


def roundup_effectivity(
        D0: DivisorClass, E: DivisorClass, lam: RealAlgebraic, mu0: Fraction,
        T: TrilinearForm, c: LinearFormC2, m_cap: int) -> EffectivityResult:
    """
    Smallest relevant m with chi(m D0 + ceil(m lam) E) >= 2.
    """
    mu0 = Fraction(mu0)
    if not (0 < mu0 < 1):
        raise PreconditionError(f"mu0 must lie in (0, 1), got {mu0}")
    if E.is_zero:
        return min_effectivity_m(T, c, D0, m_cap)
    if lam.is_rational:
        raise RationalLambdaError("lambda is rational; use min_effectivity_m on the integral ray")
    for certificate in relevant_m_certificates(lam, mu0, m_cap):
        rounded = certificate.m * D0 + certificate.ceil * E
        if effectivity_value(cube(T, rounded), c2_eval(c, rounded), 1) >= EFFECTIVE_THRESHOLD:
            return EffectivityResult(certificate.m, rr_chi(T, c, rounded, 1), certificate.ceil)
    raise RelevantSearchExhaustedError(f"no relevant m <= {m_cap} gives chi >= 2")


def elliptic_h0_upper(n: int, lle: int) -> int:
    """1 + L^2.E n (n + 1) / 2."""
    if lle <= 0:
        raise PreconditionError(f"L^2.E must be positive, got {lle}")
    if n < 0:
        raise PreconditionError("n must be non-negative")
    return 1 + lle * n * (n + 1) // 2


def fibration_threshold(
        T: TrilinearForm, c: LinearFormC2, D: DivisorClass, L: DivisorClass, E: DivisorClass,
        m: int, r: int, branch: FibrationBranch, n_cap: int) -> int | None:
    """
    Smallest n <= n_cap with chi(n m D) above the branch bound on h^0(n L).
    """
    if r <= 0:
        raise PreconditionError(f"r must be positive, got {r}")
    if branch == FibrationBranch.k3_abelian:
        lee = triple(T, L, E, E)

        def bound(n: int) -> Fraction:
            return 100 * n * m * r * lee
    else:
        lle = triple(T, L, L, E)
        if lle.denominator != 1:
            raise PreconditionError(f"L^2.E must be an integer, got {lle}")

        def bound(n: int) -> Fraction:
            return Fraction(elliptic_h0_upper(n * m * r, int(lle)))

    for n in range(1, n_cap + 1):
        if rr_chi(T, c, D, n * m) > bound(n):
            return n
    return None


def _cone_functional(cone: Cone2):
    """x -> cross(lo, x) + cross(x, hi), positive on the closed cone minus the origin."""
    (ux, uy), u_bindings = cone.ray_lo.coordinates(sympy.Dummy("u"))
    (vx, vy), v_bindings = cone.ray_hi.coordinates(sympy.Dummy("v"))
    bindings = {**u_bindings, **v_bindings}

    def value(D: DivisorClass) -> RealAlgebraic:
        x, y = D.coords
        return evaluate((ux * y - uy * x) + (x * vy - y * vx), bindings)

    return value


def _coefficient_bounds(
        mD: DivisorClass, Es: Sequence[DivisorClass], c: LinearFormC2,
        cone: Cone2 | None) -> list[int]:
    """
    Per-coefficient bounds from functionals phi that are non-negative on L and
    on every E_j: a_i <= phi(mD) / phi(E_i) whenever phi(E_i) > 0.
    """
    functionals = [lambda D: RealAlgebraic.from_rational(c2_eval(c, D))]
    if cone is not None:
        functionals.append(_cone_functional(cone))
    p, q = sympy.Dummy("p"), sympy.Dummy("q")
    bounds = [None] * len(Es)
    for phi in functionals:
        values = [phi(E) for E in Es]
        if any(v.sign() < 0 for v in values):
            continue
        total = phi(mD)
        for i, v in enumerate(values):
            if v.sign() > 0:
                bound = max(evaluate(p / q, {p: total, q: v}).floor_multiple(1), -1)
                bounds[i] = bound if bounds[i] is None else min(bounds[i], bound)
    if any(b is None for b in bounds):
        raise UnboundedEnumerationError(
            "fixed part coefficients are unbounded; supply a cone constraint"
        )
    return bounds


def fixed_part_bounds(
        mD: DivisorClass, Es: Sequence[DivisorClass], T: TrilinearForm, c: LinearFormC2,
        cone: Cone2 | None = None, box_cap: int = 1_000_000) -> list[MovableCandidate]:
    """
    Movable parts L = mD - sum a_i E_i with a_i >= 0, c2.L >= 0 and L in the
    closed cone when one is given.
    """
    if not Es:
        return [MovableCandidate(mD, (), c2_eval(c, mD))]
    bounds = _coefficient_bounds(mD, Es, c, cone)
    if any(b < 0 for b in bounds):
        return []
    size = 1
    for b in bounds:
        size *= b + 1
    if size > box_cap:
        raise EnumerationCapExceeded(f"coefficient box of size {size} exceeds {box_cap}")
    candidates = []
    for coefficients in itertools.product(*(range(b + 1) for b in bounds)):
        L = mD
        for a, E in zip(coefficients, Es):
            L = L - a * E
        c2_value = c2_eval(c, L)
        if c2_value < 0:
            continue
        if cone is not None and not (L.is_zero or cone.contains_closed(L)):
            continue
        candidates.append(MovableCandidate(L, tuple(coefficients), c2_value))
    logger.debug(f"{len(candidates)} movable candidates from a box of {size}")
    return candidates
