from fractions import Fraction

import pytest

from cy3_bounds.algebra.forms import DivisorClass, LinearFormC2, TrilinearForm, c2_eval, cube
from cy3_bounds.algebra.real_algebraic import (
    PreconditionError,
    RationalLambdaError,
    RealAlgebraic,
    relevant_m_search,
)
from cy3_bounds.entities import FibrationBranch
from cy3_bounds.geometry.cone2 import Cone2
from cy3_bounds.geometry.rays import Ray2
from cy3_bounds.services.bounds.bounds import (
    UnboundedEnumerationError,
    elliptic_h0_upper,
    fibration_threshold,
    fixed_part_bounds,
    min_effectivity_m,
    roundup_effectivity,
    rr_chi,
    threshold_m,
)

SQRT2 = RealAlgebraic.from_isolating_interval([-2, 0, 1], Fraction(1), Fraction(2))


def _diagonal(value: int) -> TrilinearForm:
    return TrilinearForm.from_mapping(2, {(0, 0, 0): value, (1, 1, 1): 1})


def _brute_threshold(cube_value: int, c2_value: int, m_cap: int) -> int | None:
    for m in range(1, m_cap + 1):
        if 2 * m ** 3 * cube_value + m * c2_value >= 24:
            return m
    return None


def test_rr_chi():
    D = DivisorClass.of(1, 0)
    assert rr_chi(_diagonal(6), LinearFormC2((12, 0)), D, 1) == 2
    assert rr_chi(_diagonal(0), LinearFormC2((0, 0)), D, 7) == 0
    assert rr_chi(_diagonal(2), LinearFormC2((24, 0)), D, 2) == Fraction(20, 3)


def test_min_effectivity_m():
    D = DivisorClass.of(1, 0)
    result = min_effectivity_m(_diagonal(2), LinearFormC2((24, 0)), D, 1000)
    assert result.m == 1
    assert result.chi_at_m == Fraction(7, 3)
    assert min_effectivity_m(_diagonal(1), LinearFormC2((0, 0)), D, 1000).m == 3
    assert min_effectivity_m(_diagonal(0), LinearFormC2((0, 0)), D, 1000).m is None


def test_threshold_matches_exhaustive_scan():
    for cube_value in range(-5, 31):
        for c2_value in range(-10, 101):
            assert threshold_m(cube_value, c2_value, 1000) == _brute_threshold(cube_value, c2_value, 1000)


def test_threshold_is_monotone_in_c2():
    for cube_value in range(-5, 31):
        previous = None
        for c2_value in range(-10, 101):
            m = threshold_m(cube_value, c2_value, 1000)
            if previous is not None:
                assert m is not None and m <= previous
            previous = m


def test_roundup_effectivity(topological_state):
    T, c = topological_state.trilinear, topological_state.c2
    D0, E = DivisorClass.of(1, 1), DivisorClass.of(1, 0)
    result = roundup_effectivity(D0, E, SQRT2, Fraction(1, 10), T, c, 10_000)
    assert result.m == 5
    assert result.ceil_coeff == 8
    assert result.chi_at_m == 603


def test_roundup_effectivity_certifies_its_multiple(topological_state):
    T, c = topological_state.trilinear, topological_state.c2
    D0, E = DivisorClass.of(1, 1), DivisorClass.of(0, 1)
    mu0 = Fraction(1, 10)
    result = roundup_effectivity(D0, E, SQRT2, mu0, T, c, 10_000)
    assert result.m in relevant_m_search(SQRT2, mu0, result.m)
    assert result.ceil_coeff == SQRT2.floor_multiple(result.m) + 1
    rounded = result.m * D0 + result.ceil_coeff * E
    assert 2 * cube(T, rounded) + c2_eval(c, rounded) >= 24


def test_roundup_effectivity_edge_cases(topological_state):
    T, c = topological_state.trilinear, topological_state.c2
    D0 = DivisorClass.of(1, 1)
    result = roundup_effectivity(D0, DivisorClass.of(0, 0), SQRT2, Fraction(1, 10), T, c, 100)
    assert result.m == 1
    assert result.chi_at_m == 3
    assert result.ceil_coeff is None
    with pytest.raises(RationalLambdaError):
        roundup_effectivity(D0, DivisorClass.of(1, 0), RealAlgebraic.from_rational(2), Fraction(1, 10), T, c, 100)
    with pytest.raises(PreconditionError):
        roundup_effectivity(D0, DivisorClass.of(1, 0), SQRT2, Fraction(1), T, c, 100)


def test_elliptic_h0_upper():
    assert elliptic_h0_upper(1, 3) == 4
    assert elliptic_h0_upper(0, 5) == 1
    assert elliptic_h0_upper(4, 2) == 21
    with pytest.raises(PreconditionError):
        elliptic_h0_upper(2, 0)


def test_fibration_threshold_k3_branch():
    T = _diagonal(6)
    c = LinearFormC2((0, 5))
    D, L, E = DivisorClass.of(1, 0), DivisorClass.of(0, 1), DivisorClass.of(0, 1)
    assert fibration_threshold(T, c, D, L, E, 1, 1, FibrationBranch.k3_abelian, 1000) == 11
    assert fibration_threshold(T, c, D, L, E, 1, 10 ** 6, FibrationBranch.k3_abelian, 20_000) == 10_001
    assert fibration_threshold(T, c, D, L, E, 1, 10 ** 6, FibrationBranch.k3_abelian, 100) is None


def test_fibration_threshold_without_cubic_growth():
    T = _diagonal(0)
    D, L, E = DivisorClass.of(1, 0), DivisorClass.of(0, 1), DivisorClass.of(0, 1)
    assert fibration_threshold(T, LinearFormC2((0, 0)), D, L, E, 1, 1, FibrationBranch.k3_abelian, 100) is None


def test_fibration_threshold_elliptic_branch():
    T = _diagonal(6)
    D, L, E = DivisorClass.of(1, 0), DivisorClass.of(0, 1), DivisorClass.of(0, 1)
    # chi(nD) = n^3 against 1 + n (n + 1) / 2
    assert fibration_threshold(T, LinearFormC2((0, 0)), D, L, E, 1, 1, FibrationBranch.elliptic, 100) == 2
    with pytest.raises(PreconditionError):
        fibration_threshold(T, LinearFormC2((0, 0)), D, L, E, 1, 0, FibrationBranch.elliptic, 100)


def test_fixed_part_bounds_by_c2():
    c = LinearFormC2((2, 0))
    E = DivisorClass.of(1, 0)
    candidates = fixed_part_bounds(DivisorClass.of(5, 3), [E], _diagonal(1), c)
    assert [L.coefficients for L in candidates] == [(a,) for a in range(6)]
    assert all(L.c2_value >= 0 for L in candidates)


def test_fixed_part_bounds_without_fixed_part():
    mD = DivisorClass.of(5, 3)
    candidates = fixed_part_bounds(mD, [], _diagonal(1), LinearFormC2((2, 0)))
    assert len(candidates) == 1
    assert candidates[0].divisor == mD


def test_fixed_part_bounds_needs_a_cone_for_c2_trivial_classes():
    with pytest.raises(UnboundedEnumerationError):
        fixed_part_bounds(DivisorClass.of(5, 3), [DivisorClass.of(0, 1)], _diagonal(1), LinearFormC2((2, 0)))


def test_fixed_part_bounds_with_cone_matches_box_scan():
    c = LinearFormC2((1, 1))
    E = DivisorClass.of(1, -1)
    cone = Cone2(Ray2.integral(1, -1), Ray2.integral(0, 1))
    mD = DivisorClass.of(3, 4)
    candidates = fixed_part_bounds(mD, [E], _diagonal(1), c, cone)
    expected = []
    for a in range(0, 60):
        L = mD - a * E
        if c2_eval(c, L) >= 0 and (L.is_zero or cone.contains_closed(L)):
            expected.append((a,))
    assert [L.coefficients for L in candidates] == expected == [(0,), (1,), (2,), (3,)]
