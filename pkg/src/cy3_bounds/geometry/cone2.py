"""
Exact cone geometry in the rank-2 divisor plane.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from cy3_bounds.algebra.forms import (
    DivisorClass,
    TrilinearForm,
    ZeroClassError,
    cube,
    cubic_coefficients,
    hessian_form,
    quad_form,
    require_rank_two,
    triple,
)
from cy3_bounds.algebra.real_algebraic import (
    RealAlgebraic,
    evaluate,
    isolate_real_roots,
    to_sympy_rational,
)
from cy3_bounds.entities import CubicCaseTag, DomainError, MovBoundBranch
from cy3_bounds.geometry.rays import (
    Ray2,
    cross_sign,
    rational_between,
    ray_from_coordinates,
    sort_ccw,
    unique_rays,
)

logger = logging.getLogger(__name__)

_EXPECTED_RAYS = {
    CubicCaseTag.three_distinct_real: 6,
    CubicCaseTag.double_root: 4,
    CubicCaseTag.one_real_root: 2,
}


class DegenerateCubicError(DomainError):
    pass


class NegativeDefiniteQuadricError(DomainError):
    pass


class InconsistentInputError(DomainError):
    pass


def _as_ray(x: Ray2 | DivisorClass) -> Ray2 | None:
    if isinstance(x, DivisorClass):
        return None if x.is_zero else Ray2.of_class(x)
    return x


@dataclass(frozen=True)
class Cone2:
    """Cone spanned counterclockwise from ray_lo to ray_hi; membership is open."""
    ray_lo: Ray2
    ray_hi: Ray2

    def __post_init__(self):
        if cross_sign(self.ray_lo, self.ray_hi) <= 0:
            raise InconsistentInputError(f"cone <{self.ray_lo}, {self.ray_hi}> is not salient")

    def contains(self, x: Ray2 | DivisorClass) -> bool:
        ray = _as_ray(x)
        if ray is None:
            return False
        return cross_sign(self.ray_lo, ray) > 0 and cross_sign(ray, self.ray_hi) > 0

    def on_boundary(self, x: Ray2 | DivisorClass) -> bool:
        ray = _as_ray(x)
        return ray is not None and (ray == self.ray_lo or ray == self.ray_hi)

    def contains_closed(self, x: Ray2 | DivisorClass) -> bool:
        return self.contains(x) or self.on_boundary(x)

    def negated(self) -> "Cone2":
        return Cone2(self.ray_lo.negated(), self.ray_hi.negated())

    def sample_ray(self) -> Ray2:
        return rational_between(self.ray_lo, self.ray_hi)


def cone_contains(C: Cone2, x: Ray2 | DivisorClass) -> bool:
    return C.contains(x)


def cone_intersect(C1: Cone2, C2: Cone2) -> Cone2 | None:
    """Intersection of two cones, or None when it has empty interior."""
    if C2.contains_closed(C1.ray_lo):
        lo = C1.ray_lo
    elif C1.contains_closed(C2.ray_lo):
        lo = C2.ray_lo
    else:
        return None
    if C2.contains_closed(C1.ray_hi):
        hi = C1.ray_hi
    elif C1.contains_closed(C2.ray_hi):
        hi = C2.ray_hi
    else:
        return None
    if cross_sign(lo, hi) <= 0:
        return None
    return Cone2(lo, hi)


@dataclass(frozen=True)
class CubicCase:
    tag: CubicCaseTag
    vanishing_rays: tuple[Ray2, ...]
    discriminant: Fraction


@dataclass(frozen=True)
class ComponentSet:
    components: tuple[Cone2, ...]

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)


def cubic_discriminant(a: Fraction, b: Fraction, c: Fraction, d: Fraction) -> Fraction:
    return b * b * c * c - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d + 18 * a * b * c * d


def binary_root_rays(coeffs: Sequence[Fraction]) -> list[Ray2]:
    """
    Rays where the binary form sum_i coeffs[i] x^(n-i) y^i vanishes, counterclockwise.
    """
    if all(c == 0 for c in coeffs):
        raise DegenerateCubicError("binary form is identically zero")
    rays = []
    if coeffs[-1] == 0:
        rays += [Ray2.integral(0, 1), Ray2.integral(0, -1)]
    if any(c != 0 for c in coeffs[1:]):
        for t in isolate_real_roots(coeffs):
            rays += [Ray2.sloped(1, t), Ray2.sloped(-1, t)]
    return sort_ccw(unique_rays(rays))


def classify_cubic(T: TrilinearForm) -> CubicCase:
    require_rank_two(T)
    a, b, c, d = cubic_coefficients(T)
    if a == 0 and b == 0 and c == 0 and d == 0:
        raise DegenerateCubicError("the cubic form is identically zero")
    if hessian_form(T).is_zero:
        raise DegenerateCubicError("the cubic form has a triple root")
    disc = cubic_discriminant(a, b, c, d)
    if disc > 0:
        tag = CubicCaseTag.three_distinct_real
    elif disc == 0:
        tag = CubicCaseTag.double_root
    else:
        tag = CubicCaseTag.one_real_root
    rays = binary_root_rays([a, b, c, d])
    if len(rays) != _EXPECTED_RAYS[tag]:
        raise DegenerateCubicError(f"{tag.value} cubic with {len(rays)} vanishing rays")
    logger.debug(f"cubic {a, b, c, d} classified as {tag.value}")
    return CubicCase(tag, tuple(rays), disc)


def _in_positive_index_cone(T: TrilinearForm, ray: Ray2) -> bool:
    D = DivisorClass(ray.vector)
    return cube(T, D) > 0 and hessian_form(T)(*D.coords) < 0


def circle_subdivision(T: TrilinearForm) -> list[Ray2]:
    """Roots of the cubic and of the Hessian determinant, counterclockwise from (1, 0)."""
    case = classify_cubic(T)
    boundary = list(case.vanishing_rays)
    boundary += binary_root_rays(hessian_form(T).binary_coefficients)
    return sort_ccw(unique_rays(boundary))


def positive_index_components(T: TrilinearForm) -> ComponentSet:
    boundary = circle_subdivision(T)
    components = []
    for i, lo in enumerate(boundary):
        hi = boundary[(i + 1) % len(boundary)]
        if _in_positive_index_cone(T, rational_between(lo, hi)):
            components.append(Cone2(lo, hi))
    # the wrap-around sector is the one that can contain (1, 0)
    if components and components[-1].contains(Ray2.integral(1, 0)):
        components = [components[-1]] + components[:-1]
    logger.info(f"Found {len(components)} positive index components")
    return ComponentSet(tuple(components))


def _quad_coefficients(T: TrilinearForm, ex, ey) -> tuple:
    """Coefficients a, b, c of Q_E = a x^2 + 2 b x y + c y^2 as sympy expressions."""
    def entry(i, j, k):
        return to_sympy_rational(T.entry(i, j, k))

    a = ex * entry(0, 0, 0) + ey * entry(1, 0, 0)
    b = ex * entry(0, 0, 1) + ey * entry(1, 0, 1)
    c = ex * entry(0, 1, 1) + ey * entry(1, 1, 1)
    return a, b, c


def quadratic_root_rays(a, b, c, bindings: dict) -> tuple[list[Ray2], bool]:
    """
    Root rays of a x^2 + 2 b x y + c y^2 with algebraic coefficients.
    :return: rays and whether the form is degenerate (double root)
    """
    c_value = evaluate(c, bindings)
    if c_value.sign() == 0:
        b_value = evaluate(b, bindings)
        rays = [Ray2.integral(0, 1), Ray2.integral(0, -1)]
        if b_value.sign() == 0:
            if evaluate(a, bindings).sign() == 0:
                raise InconsistentInputError("quadratic form is identically zero")
            return rays, True
        u = evaluate(-a / (2 * b), bindings)
        return rays + [Ray2.sloped(1, u), Ray2.sloped(-1, u)], False
    disc = evaluate(b * b - a * c, bindings)
    if disc.sign() < 0:
        return [], False
    if disc.sign() == 0:
        u = evaluate(-b / c, bindings)
        return [Ray2.sloped(1, u), Ray2.sloped(-1, u)], True
    root = sympy.Dummy("r")
    scope = {**bindings, root: disc.sqrt()}
    rays = []
    for sign in (1, -1):
        u = evaluate((-b + sign * root) / c, scope)
        rays += [Ray2.sloped(1, u), Ray2.sloped(-1, u)]
    return rays, False


def _class_coordinates(E: DivisorClass | Ray2) -> tuple[tuple, dict, Ray2]:
    if isinstance(E, DivisorClass):
        if E.is_zero:
            raise ZeroClassError("E is the zero class")
        return (sympy.Integer(E.coords[0]), sympy.Integer(E.coords[1])), {}, Ray2.of_class(E)
    coords, bindings = E.coordinates(sympy.Dummy("t"))
    return coords, bindings, E


def subdivide_by_quadrics(P: Cone2, T: TrilinearForm, Es: Sequence[DivisorClass]) -> list[Cone2]:
    """
    Open subcones of P on which T(E, D, D) > 0 for every listed E.
    """
    require_rank_two(T)
    cuts = []
    forms = []
    for E in Es:
        Q = quad_form(T, E)
        if Q.signature()[0] == 0:
            raise NegativeDefiniteQuadricError(f"T({E}, L, L) is never positive")
        forms.append(Q)
        (ex, ey), bindings, _ = _class_coordinates(E)
        rays, _ = quadratic_root_rays(*_quad_coefficients(T, ex, ey), bindings)
        cuts += [ray for ray in rays if P.contains(ray)]
    ordered = _order_within(unique_rays(cuts))
    edges = [P.ray_lo] + ordered + [P.ray_hi]
    subcones = []
    for lo, hi in zip(edges, edges[1:]):
        sample = rational_between(lo, hi)
        if all(Q(*sample.vector) > 0 for Q in forms):
            subcones.append(Cone2(lo, hi))
    return subcones


def _order_within(rays: list[Ray2]) -> list[Ray2]:
    """Counterclockwise order of rays lying in a common salient cone."""
    ordered = []
    for ray in rays:
        position = 0
        while position < len(ordered) and cross_sign(ordered[position], ray) > 0:
            position += 1
        ordered.insert(position, ray)
    return ordered


@dataclass(frozen=True)
class DeltaRay:
    ray: Ray2
    e_dot_delta_trivial: bool


def delta_ray(P: Cone2, T: TrilinearForm, E: DivisorClass | Ray2) -> DeltaRay:
    """
    The ray of P on which T(E, D, D) vanishes. The flag is set when E.Delta.L is
    identically zero in L.
    """
    require_rank_two(T)
    (ex, ey), bindings, e_ray = _class_coordinates(E)
    if P.contains_closed(e_ray) or P.negated().contains_closed(e_ray):
        raise InconsistentInputError(f"{e_ray} lies in the closure of P or of -P")
    rays, degenerate = quadratic_root_rays(*_quad_coefficients(T, ex, ey), bindings)
    inside = [ray for ray in rays if P.contains(ray)]
    if len(inside) > 1:
        raise InconsistentInputError("the quadric of E has two root rays in P")
    if not inside:
        inside = [ray for ray in rays if P.on_boundary(ray)]
        if len(inside) != 1:
            raise InconsistentInputError("the quadric of E has no root ray in the closure of P")
    logger.debug(f"delta ray for {e_ray}: {inside[0]} (semi-ample: {degenerate})")
    return DeltaRay(inside[0], degenerate)


@dataclass(frozen=True)
class MovBound:
    ray: Ray2
    alpha_bound: RealAlgebraic | None
    branch: MovBoundBranch


def adjacent_edges(P: Cone2, E: Ray2 | DivisorClass) -> tuple[Ray2, Ray2]:
    """
    The edge of P on the side of E and the opposite edge.
    :return: (near, far)
    """
    ray = _as_ray(E)
    if ray is None:
        raise ZeroClassError("E is the zero class")
    if cross_sign(P.ray_hi, ray) > 0 and cross_sign(ray, P.ray_lo.negated()) > 0:
        return P.ray_hi, P.ray_lo
    if cross_sign(P.ray_hi.negated(), ray) > 0 and cross_sign(ray, P.ray_lo) > 0:
        return P.ray_lo, P.ray_hi
    raise InconsistentInputError(f"{ray} lies in the closure of P or of -P")


def _cubic_expr(T: TrilinearForm, x, y):
    a, b, c, d = (to_sympy_rational(v) for v in cubic_coefficients(T))
    return a * x ** 3 + b * x ** 2 * y + c * x * y ** 2 + d * y ** 3


def mov_bound_ray(P: Cone2, T: TrilinearForm, E: DivisorClass, delta: Ray2) -> MovBound:
    """
    A ray R of P bounding the movable classes on the side of E.

    E^3 >= 0: R through Delta - alpha* E with alpha*^2 = -Delta^3 / (Delta.E^2).
    E^3 < 0, three distinct roots: R through B - 2 beta* E, B the far edge and
    beta* the largest beta with B + beta E in P.
    E^3 < 0 otherwise: R is the far edge.
    """
    case = classify_cubic(T)
    if E.is_zero:
        raise ZeroClassError("E is the zero class")
    (dx, dy), bindings = delta.coordinates(sympy.Dummy("t"))
    e0, e1 = E.coords
    Q = quad_form(T, E)
    kernel = [
        evaluate(to_sympy_rational(Q.a) * dx + to_sympy_rational(Q.b) * dy, bindings),
        evaluate(to_sympy_rational(Q.b) * dx + to_sympy_rational(Q.c) * dy, bindings),
    ]
    if all(v.sign() == 0 for v in kernel):
        raise InconsistentInputError("E.Delta.L vanishes identically; Delta is semi-ample")

    if cube(T, E) >= 0:
        g0 = to_sympy_rational(triple(T, DivisorClass((1, 0)), E, E))
        g1 = to_sympy_rational(triple(T, DivisorClass((0, 1)), E, E))
        pairing = g0 * dx + g1 * dy
        if evaluate(pairing, bindings).sign() >= 0:
            raise InconsistentInputError("Delta.E^2 is not negative")
        alpha_squared = evaluate(-_cubic_expr(T, dx, dy) / pairing, bindings)
        if alpha_squared.sign() < 0:
            raise InconsistentInputError("Delta^3 is negative")
        alpha = alpha_squared.sqrt()
        symbol = sympy.Dummy("alpha")
        ray = ray_from_coordinates(dx - symbol * e0, dy - symbol * e1, {**bindings, symbol: alpha})
        return MovBound(ray, alpha, MovBoundBranch.alpha_star)

    near, far = adjacent_edges(P, E)
    if case.tag != CubicCaseTag.three_distinct_real:
        return MovBound(far, None, MovBoundBranch.edge)
    (ax, ay), near_bindings = near.coordinates(sympy.Dummy("a"))
    (bx, by), far_bindings = far.coordinates(sympy.Dummy("b"))
    scope = {**near_bindings, **far_bindings}
    beta = evaluate(-(ax * by - ay * bx) / (ax * e1 - ay * e0), scope)
    if beta.sign() < 0:
        beta = RealAlgebraic.from_rational(0)
    symbol = sympy.Dummy("beta")
    ray = ray_from_coordinates(bx - 2 * symbol * e0, by - 2 * symbol * e1, {**far_bindings, symbol: beta})
    return MovBound(ray, beta.scaled(2), MovBoundBranch.twice_beta)
