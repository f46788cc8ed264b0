from fractions import Fraction

import pytest

from cy3_bounds.algebra.forms import DivisorClass, TrilinearForm, cube, quad_form, triple, triple_vectors
from cy3_bounds.algebra.real_algebraic import RealAlgebraic, sign_at
from cy3_bounds.entities import CubicCaseTag, FormsMode, MovBoundBranch
from cy3_bounds.geometry.cone2 import (
    Cone2,
    DegenerateCubicError,
    InconsistentInputError,
    NegativeDefiniteQuadricError,
    adjacent_edges,
    classify_cubic,
    cone_contains,
    cone_intersect,
    delta_ray,
    mov_bound_ray,
    positive_index_components,
    subdivide_by_quadrics,
)
from cy3_bounds.geometry.rays import Ray2, compare_angle, cross_sign, rational_between, sort_ccw

Q1 = Cone2(Ray2.integral(1, 0), Ray2.integral(0, 1))


def _transformed(T: TrilinearForm, g: tuple[tuple[int, int], tuple[int, int]]) -> TrilinearForm:
    """T(g D1, g D2, g D3) for an integral matrix g given by its columns."""
    columns = g
    values = {}
    for key in ((0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)):
        values[key] = triple_vectors(T, columns[key[0]], columns[key[1]], columns[key[2]])
    return TrilinearForm.from_mapping(2, values, FormsMode.normal_form)


def _random_unimodular(rng) -> tuple[tuple[int, int], tuple[int, int]]:
    a, b, c, d = 1, 0, 0, 1
    for _ in range(3):
        k = rng.randint(-2, 2)
        if rng.random() < 0.5:
            a, b, c, d = a, b + k * a, c, d + k * c
        else:
            a, b, c, d = a + k * b, b, c + k * d, d
    # columns (a, c) and (b, d)
    return (a, c), (b, d)


def _sample_classes(P: Cone2, rng, count: int) -> list[DivisorClass]:
    middle = P.sample_ray()
    left = rational_between(P.ray_lo, middle).vector
    right = rational_between(middle, P.ray_hi).vector
    samples = []
    for _ in range(count):
        s, t = rng.randint(1, 20), rng.randint(1, 20)
        samples.append(DivisorClass.of(s * left[0] + t * right[0], s * left[1] + t * right[1]))
    return samples


def test_rays_sort_counterclockwise():
    rays = [Ray2.integral(0, -1), Ray2.integral(-1, 0), Ray2.integral(1, 1), Ray2.integral(1, 0)]
    assert sort_ccw(rays) == [Ray2.integral(1, 0), Ray2.integral(1, 1), Ray2.integral(-1, 0), Ray2.integral(0, -1)]
    assert compare_angle(Ray2.integral(1, -1), Ray2.integral(1, 0)) == 1


def test_ray_equality_is_primitive():
    assert Ray2.integral(2, 4) == Ray2.integral(1, 2)
    assert Ray2.integral(2, 4) != Ray2.integral(-1, -2)
    assert Ray2.sloped(1, RealAlgebraic.from_rational(Fraction(1, 2))) == Ray2.integral(2, 1)


def test_cross_sign_with_algebraic_slope():
    slope = RealAlgebraic.from_isolating_interval([-2, 0, 1], Fraction(1), Fraction(2))
    ray = Ray2.sloped(1, slope)
    assert cross_sign(Ray2.integral(1, 1), ray) == 1
    assert cross_sign(ray, Ray2.integral(2, 3)) == 1
    assert cross_sign(ray.negated(), Ray2.integral(1, 1)) == 1


def test_cone_membership_and_intersection():
    C = Cone2(Ray2.integral(1, 0), Ray2.integral(-1, 1))
    assert cone_contains(Q1, DivisorClass.of(2, 3))
    assert not Q1.contains(DivisorClass.of(1, 0))
    assert Q1.contains_closed(DivisorClass.of(1, 0))
    assert not Q1.contains(DivisorClass.of(0, 0))
    assert cone_intersect(Q1, C) == Q1
    assert cone_intersect(C, Cone2(Ray2.integral(0, 1), Ray2.integral(-1, 0))) == Cone2(
        Ray2.integral(0, 1), Ray2.integral(-1, 1)
    )
    assert cone_intersect(Q1, Q1.negated()) is None


def test_non_salient_cone_is_rejected():
    with pytest.raises(InconsistentInputError):
        Cone2(Ray2.integral(0, 1), Ray2.integral(1, 0))


def test_classify_cubic_cases(three_lines, double_root, one_real_root):
    assert classify_cubic(three_lines).tag == CubicCaseTag.three_distinct_real
    assert len(classify_cubic(three_lines).vanishing_rays) == 6
    assert classify_cubic(double_root).tag == CubicCaseTag.double_root
    assert len(classify_cubic(double_root).vanishing_rays) == 4
    assert classify_cubic(one_real_root).tag == CubicCaseTag.one_real_root
    assert classify_cubic(one_real_root).vanishing_rays == (Ray2.integral(1, 0), Ray2.integral(-1, 0))


def test_classify_cubic_triple_root_and_zero():
    with pytest.raises(DegenerateCubicError):
        classify_cubic(TrilinearForm.from_cubic(1, 0, 0, 0))
    with pytest.raises(DegenerateCubicError):
        classify_cubic(TrilinearForm.from_cubic(0, 0, 0, 0))


def test_components_of_three_lines(three_lines):
    components = positive_index_components(three_lines)
    assert list(components) == [
        Q1,
        Cone2(Ray2.integral(-1, 1), Ray2.integral(-1, 0)),
        Cone2(Ray2.integral(0, -1), Ray2.integral(1, -1)),
    ]


def test_components_of_double_root(double_root):
    components = positive_index_components(double_root)
    assert list(components) == [Q1, Cone2(Ray2.integral(0, 1), Ray2.integral(-1, 0))]


def test_components_of_one_real_root(one_real_root):
    components = positive_index_components(one_real_root)
    assert len(components) == 2
    first, second = components
    assert first.ray_lo == Ray2.integral(1, 0)
    assert not first.ray_hi.is_integral
    assert sign_at([-1, 0, 3], first.ray_hi.slope) == 0
    assert first.ray_hi.sign == 1
    assert second.ray_hi == Ray2.integral(-1, 0)
    assert second.ray_lo.sign == -1


@pytest.mark.parametrize("coefficients", [(0, 1, 1, 0), (0, 1, 0, 0), (0, 1, 0, 1)])
def test_positivity_on_components(coefficients, rng):
    base = TrilinearForm.from_cubic(*coefficients)
    for _ in range(100):
        T = _transformed(base, _random_unimodular(rng))
        for P in positive_index_components(T):
            samples = _sample_classes(P, rng, 300)
            for D1, D2, D3 in zip(samples[:100], samples[100:200], samples[200:]):
                assert triple(T, D1, D2, D3) > 0


@pytest.mark.parametrize("coefficients", [(0, 1, 1, 0), (0, 1, 0, 0), (0, 1, 0, 1)])
def test_subcones_keep_quadric_positive(coefficients, rng):
    base = TrilinearForm.from_cubic(*coefficients)
    checked = 0
    for _ in range(100):
        T = _transformed(base, _random_unimodular(rng))
        P = positive_index_components(T).components[0]
        E = DivisorClass.of(rng.randint(-6, 6), rng.randint(-6, 6))
        if E.is_zero or P.contains_closed(E) or P.negated().contains_closed(E):
            continue
        try:
            subcones = subdivide_by_quadrics(P, T, [E])
        except NegativeDefiniteQuadricError:
            continue
        for sub in subcones:
            samples = _sample_classes(sub, rng, 200)
            for D in samples:
                assert triple(T, E, D, D) > 0
            if quad_form(T, E).signature() == (1, 1, 0):
                for D1, D2 in zip(samples[:100], samples[100:]):
                    assert triple(T, E, D1, D2) > 0
            checked += 1
    assert checked > 0


def test_subdivide_rejects_negative_definite(one_real_root):
    P = positive_index_components(one_real_root).components[0]
    # T((0, -1), L, L) = -(x^2 + 3 y^2) / 3
    with pytest.raises(NegativeDefiniteQuadricError):
        subdivide_by_quadrics(P, one_real_root, [DivisorClass.of(0, -1)])


def test_delta_ray_three_lines(three_lines):
    result = delta_ray(Q1, three_lines, DivisorClass.of(-1, 2))
    assert not result.ray.is_integral
    # Delta = (1, 1 + sqrt 3)
    assert sign_at([-2, -2, 1], result.ray.slope) == 0
    assert result.ray.slope > 2
    assert not result.e_dot_delta_trivial


def test_delta_ray_double_root_closed_form(double_root, rng):
    for _ in range(100):
        a, b = rng.randint(1, 50), rng.randint(1, 50)
        result = delta_ray(Q1, double_root, DivisorClass.of(a, -b))
        assert result.ray == Ray2.integral(2 * a, b)


def test_delta_ray_semi_ample_flag(one_real_root):
    P = positive_index_components(one_real_root).components[0]
    sqrt3 = RealAlgebraic.from_isolating_interval([-3, 0, 1], Fraction(1), Fraction(2))
    E = Ray2.sloped(-1, sqrt3.scaled(-1).scaled(Fraction(1, 3)))
    # E spans (-sqrt 3, 1)
    result = delta_ray(P, one_real_root, E)
    assert result.e_dot_delta_trivial
    assert sign_at([-1, 0, 3], result.ray.slope) == 0


def test_delta_ray_rejects_classes_in_p(three_lines):
    with pytest.raises(InconsistentInputError):
        delta_ray(Q1, three_lines, DivisorClass.of(1, 1))
    with pytest.raises(InconsistentInputError):
        delta_ray(Q1, three_lines, DivisorClass.of(-1, 0))


def test_adjacent_edges(three_lines):
    assert adjacent_edges(Q1, DivisorClass.of(-1, 2)) == (Ray2.integral(0, 1), Ray2.integral(1, 0))
    assert adjacent_edges(Q1, DivisorClass.of(1, -1)) == (Ray2.integral(1, 0), Ray2.integral(0, 1))


def test_mov_bound_alpha_star(three_lines):
    E = DivisorClass.of(-2, 1)
    delta = delta_ray(Q1, three_lines, E)
    mov = mov_bound_ray(Q1, three_lines, E, delta.ray)
    assert mov.branch == MovBoundBranch.alpha_star
    assert sign_at([-1, 0, 2], mov.alpha_bound) == 0
    # R through Delta - alpha* E points below the x axis
    assert mov.ray.sign == 1
    assert mov.ray.slope < 0


def test_mov_bound_twice_beta(three_lines):
    E = DivisorClass.of(-1, 2)
    assert cube(three_lines, E) < 0
    delta = delta_ray(Q1, three_lines, E)
    mov = mov_bound_ray(Q1, three_lines, E, delta.ray)
    assert mov.branch == MovBoundBranch.twice_beta
    assert mov.alpha_bound == 2
    assert mov.ray == Ray2.integral(3, -4)


def test_mov_bound_edge(double_root):
    E = DivisorClass.of(1, -1)
    delta = delta_ray(Q1, double_root, E)
    assert delta.ray == Ray2.integral(2, 1)
    mov = mov_bound_ray(Q1, double_root, E, delta.ray)
    assert mov.branch == MovBoundBranch.edge
    assert mov.alpha_bound is None
    assert mov.ray == Ray2.integral(0, 1)
