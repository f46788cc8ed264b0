from fractions import Fraction

import mpmath
import pytest
import sympy

from cy3_bounds.algebra.real_algebraic import (
    PreconditionError,
    RationalLambdaError,
    RealAlgebraic,
    RelevantSearchExhaustedError,
    ZeroPolynomialError,
    compare,
    count_real_roots,
    evaluate,
    isolate_real_roots,
    relevant_m_certificates,
    relevant_m_search,
    sign_at,
)

SQRT2 = RealAlgebraic.from_isolating_interval([-2, 0, 1], Fraction(1), Fraction(2))
SQRT3 = RealAlgebraic.from_isolating_interval([-3, 0, 1], Fraction(1), Fraction(2))
INV_SQRT3 = RealAlgebraic.from_isolating_interval([-1, 0, 3], Fraction(0), Fraction(1))
CBRT2 = RealAlgebraic.from_isolating_interval([-2, 0, 0, 1], Fraction(1), Fraction(2))


def _mp_values():
    mpmath.mp.prec = 256
    return {
        "sqrt2": (SQRT2, mpmath.sqrt(2)),
        "sqrt3": (SQRT3, mpmath.sqrt(3)),
        "inv_sqrt3": (INV_SQRT3, 1 / mpmath.sqrt(3)),
        "cbrt2": (CBRT2, mpmath.cbrt(2)),
    }


def test_isolate_real_roots_sorted_and_exact():
    roots = isolate_real_roots([0, -2, 0, 1])
    assert len(roots) == 3
    assert roots[1].is_rational and roots[1].value == 0
    assert roots[0] == -SQRT2
    assert roots[2] == SQRT2
    assert compare(roots[0], roots[2]) == -1


def test_isolate_real_roots_without_real_roots():
    assert isolate_real_roots([1, 0, 1]) == []


def test_zero_polynomial_is_rejected():
    with pytest.raises(ZeroPolynomialError):
        isolate_real_roots([0, 0, 0])


def test_count_real_roots_closed_interval():
    # roots 1 and 2 of x^2 - 3x + 2, both endpoints included
    assert count_real_roots([2, -3, 1], Fraction(1), Fraction(2)) == 2
    assert count_real_roots([2, -3, 1], Fraction(3, 2), Fraction(5)) == 1
    assert count_real_roots([-2, 0, 1], Fraction(-2), Fraction(2)) == 2


def test_from_isolating_interval_needs_a_unique_root():
    with pytest.raises(PreconditionError):
        RealAlgebraic.from_isolating_interval([-2, 0, 1], Fraction(-2), Fraction(2))


def test_comparisons_with_rationals():
    assert SQRT2 > 1
    assert SQRT2 < Fraction(3, 2)
    assert SQRT3 > SQRT2
    assert INV_SQRT3 < Fraction(3, 5)
    assert CBRT2 < SQRT2


def test_sqrt_of_rationals_and_irrationals():
    assert RealAlgebraic.from_rational(4).sqrt() == 2
    assert RealAlgebraic.from_rational(Fraction(9, 4)).sqrt().value == Fraction(3, 2)
    assert RealAlgebraic.from_rational(2).sqrt() == SQRT2
    fourth_root = SQRT2.sqrt()
    assert sign_at([-2, 0, 0, 0, 1], fourth_root) == 0
    with pytest.raises(PreconditionError):
        RealAlgebraic.from_rational(-1).sqrt()


def test_sign_at_roots_and_elsewhere():
    assert sign_at([-2, 0, 1], SQRT2) == 0
    assert sign_at([-3, 0, 1], SQRT2) == -1
    assert sign_at([0, 1], -SQRT2) == -1


def test_scaled_and_shifted():
    assert SQRT2.scaled(2) == RealAlgebraic.from_rational(8).sqrt()
    assert sign_at([-1, -2, 1], SQRT2.shifted(1)) == 0
    assert (SQRT2 + 1) > 2


def test_floor_multiple():
    assert SQRT2.floor_multiple(10) == 14
    assert INV_SQRT3.floor_multiple(7) == 4
    assert RealAlgebraic.from_rational(Fraction(7, 2)).floor_multiple(2) == 7


def test_evaluate_expression_of_bound_numbers():
    s, t = sympy.Symbol("s"), sympy.Symbol("t")
    value = evaluate(s * t, {s: SQRT2, t: SQRT3})
    assert sign_at([-6, 0, 1], value) == 0
    assert evaluate(s * s, {s: SQRT2}) == 2
    inverse = evaluate(1 / (s + 1), {s: SQRT2})
    # 1 / (sqrt 2 + 1) = sqrt 2 - 1
    assert inverse == SQRT2.shifted(-1)


def test_relevant_m_search_examples():
    assert relevant_m_search(INV_SQRT3, Fraction(1, 10), 10) == [7]
    assert relevant_m_search(SQRT2, Fraction(1, 2), 3) == [1, 3]
    assert relevant_m_search(SQRT2, Fraction(1, 10), 10)[0] == 5


def test_relevant_m_certificates_are_consistent():
    for certificate in relevant_m_certificates(SQRT3, Fraction(1, 10), 200):
        assert certificate.floor == SQRT3.floor_multiple(certificate.m)
        assert certificate.frac_upper <= Fraction(1, 10)
        assert certificate.ceil == certificate.floor + 1


def test_relevant_m_search_exhausted():
    with pytest.raises(RelevantSearchExhaustedError):
        relevant_m_search(SQRT2, Fraction(1, 10), 4)


def test_relevant_m_search_preconditions():
    with pytest.raises(RationalLambdaError):
        relevant_m_search(RealAlgebraic.from_rational(Fraction(1, 2)), Fraction(1, 10), 10)
    with pytest.raises(PreconditionError):
        relevant_m_search(SQRT2, Fraction(1), 10)
    with pytest.raises(PreconditionError):
        relevant_m_search(-SQRT2, Fraction(1, 10), 10)


@pytest.mark.parametrize("name", ["sqrt2", "sqrt3", "inv_sqrt3", "cbrt2"])
@pytest.mark.parametrize("mu0", [Fraction(1, 10), Fraction(1, 100)])
def test_relevant_m_search_matches_high_precision_scan(name, mu0):
    lam, approx = _mp_values()[name]
    m_cap = 10_000
    bound = mpmath.mpf(mu0.numerator) / mu0.denominator
    expected = [m for m in range(1, m_cap + 1) if mpmath.frac(m * approx) < bound]
    assert relevant_m_search(lam, mu0, m_cap) == expected
