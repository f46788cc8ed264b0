from fractions import Fraction

import pytest

from cy3_bounds.algebra.forms import (
    DimensionMismatchError,
    DivisorClass,
    FormsInputError,
    LinearFormC2,
    QuadraticForm2,
    TrilinearForm,
    UnsupportedRankError,
    ZeroClassError,
    c2_eval,
    cube,
    cubic_coefficients,
    hessian_form,
    index_signature,
    quad_form,
    require_rank_two,
    triple,
    validate_rr_integrality,
)
from cy3_bounds.entities import FormsMode


def test_from_cubic_round_trips_coefficients():
    T = TrilinearForm.from_cubic(1, 2, 3, 4)
    assert cubic_coefficients(T) == (1, 2, 3, 4)
    assert T.mode == FormsMode.normal_form


def test_cube_and_triple(three_lines):
    assert cube(three_lines, DivisorClass.of(1, 1)) == 2
    assert cube(three_lines, DivisorClass.of(-2, 1)) == 2
    assert cube(three_lines, DivisorClass.of(-1, 2)) == -2
    # polarization: T(D, D, D') is a third of the directional derivative
    assert triple(three_lines, DivisorClass.of(1, 0), DivisorClass.of(1, 0), DivisorClass.of(0, 1)) == Fraction(1, 3)


def test_triple_is_symmetric(rng, topological_state):
    T = topological_state.trilinear
    for _ in range(50):
        u, v, w = (DivisorClass.of(rng.randint(-9, 9), rng.randint(-9, 9)) for _ in range(3))
        value = triple(T, u, v, w)
        assert value == triple(T, v, w, u) == triple(T, w, u, v) == triple(T, v, u, w)


def test_quad_form_matches_triple(rng, one_real_root):
    for _ in range(50):
        E = DivisorClass.of(rng.randint(-9, 9), rng.randint(-9, 9))
        L = DivisorClass.of(rng.randint(-9, 9), rng.randint(-9, 9))
        assert quad_form(one_real_root, E)(*L.coords) == triple(one_real_root, E, L, L)


def test_hessian_form_of_normal_forms(three_lines, double_root):
    assert hessian_form(double_root) == QuadraticForm2(Fraction(-1, 9), Fraction(0), Fraction(0))
    assert hessian_form(three_lines) == QuadraticForm2(Fraction(-1, 9), Fraction(-1, 18), Fraction(-1, 9))


def test_hessian_sign_detects_indefinite_index(rng, one_real_root):
    hessian = hessian_form(one_real_root)
    for _ in range(100):
        D = DivisorClass.of(rng.randint(-20, 20), rng.randint(-20, 20))
        if D.is_zero:
            continue
        indefinite = index_signature(one_real_root, D) == (1, 1, 0)
        assert indefinite == (hessian(*D.coords) < 0)


def _diagonal_signature(a: Fraction, b: Fraction, c: Fraction) -> tuple[int, int, int]:
    """Signature of [[a, b], [b, c]] by completing the square."""
    if a != 0:
        pivots = [a, c - b * b / a]
    elif c != 0:
        pivots = [c, a - b * b / c]
    elif b != 0:
        # 2 b x y = b/2 (x + y)^2 - b/2 (x - y)^2
        pivots = [b, -b]
    else:
        pivots = [Fraction(0), Fraction(0)]
    return sum(p > 0 for p in pivots), sum(p < 0 for p in pivots), sum(p == 0 for p in pivots)


def test_index_signature_matches_diagonalization(rng):
    e1, e2 = DivisorClass.of(1, 0), DivisorClass.of(0, 1)
    for _ in range(200):
        coefficients = [rng.randint(-3, 3) for _ in range(4)]
        if not any(coefficients):
            continue
        T = TrilinearForm.from_cubic(*coefficients)
        D = DivisorClass.of(rng.randint(-9, 9), rng.randint(-9, 9))
        if D.is_zero:
            continue
        expected = _diagonal_signature(triple(T, D, e1, e1), triple(T, D, e1, e2), triple(T, D, e2, e2))
        assert index_signature(T, D) == expected


def test_cube_polarization(rng):
    for _ in range(200):
        T = TrilinearForm.from_cubic(*(rng.randint(-5, 5) for _ in range(4)))
        D1 = DivisorClass.of(rng.randint(-9, 9), rng.randint(-9, 9))
        D2 = DivisorClass.of(rng.randint(-9, 9), rng.randint(-9, 9))
        a, b = rng.randint(-7, 7), rng.randint(-7, 7)
        expected = (
            a ** 3 * cube(T, D1)
            + 3 * a * a * b * triple(T, D1, D1, D2)
            + 3 * a * b * b * triple(T, D1, D2, D2)
            + b ** 3 * cube(T, D2)
        )
        assert cube(T, a * D1 + b * D2) == expected


def test_riemann_roch_integrality_on_random_classes(rng, topological_state):
    T, c = topological_state.trilinear, topological_state.c2
    assert validate_rr_integrality(T, c).accepted
    for _ in range(1000):
        D = DivisorClass.of(rng.randint(-500, 500), rng.randint(-500, 500))
        assert (2 * cube(T, D) + c2_eval(c, D)) % 12 == 0


def test_index_signature_of_zero_class(three_lines):
    with pytest.raises(ZeroClassError):
        index_signature(three_lines, DivisorClass.of(0, 0))


def test_quadratic_form_signature():
    assert QuadraticForm2(Fraction(1), Fraction(0), Fraction(-1)).signature() == (1, 1, 0)
    assert QuadraticForm2(Fraction(1), Fraction(0), Fraction(1)).signature() == (2, 0, 0)
    assert QuadraticForm2(Fraction(-1), Fraction(0), Fraction(0)).signature() == (0, 1, 1)
    assert QuadraticForm2(Fraction(0), Fraction(0), Fraction(0)).signature() == (0, 0, 2)


def test_c2_eval():
    assert c2_eval(LinearFormC2((2, 2)), DivisorClass.of(1, -2)) == -2


def test_topological_entries_must_be_integers():
    with pytest.raises(FormsInputError):
        TrilinearForm.from_cubic(0, 1, 1, 0, mode=FormsMode.topological)


def test_invalid_index_is_rejected():
    with pytest.raises(FormsInputError):
        TrilinearForm.from_mapping(2, {(0, 0, 2): 1})


def test_divisor_class_parse():
    assert DivisorClass.parse("1,-2") == DivisorClass.of(1, -2)
    with pytest.raises(FormsInputError):
        DivisorClass.parse("1,a")


def test_rank_mismatch(three_lines):
    with pytest.raises(DimensionMismatchError):
        cube(three_lines, DivisorClass.of(1, 0, 0))
    with pytest.raises(DimensionMismatchError):
        c2_eval(LinearFormC2((1, 1, 1)), DivisorClass.of(1, 0))


def test_rank_three_forms_are_unsupported_for_the_plane():
    T = TrilinearForm.from_mapping(3, {(0, 1, 2): 1})
    with pytest.raises(UnsupportedRankError):
        require_rank_two(T)
    assert cube(T, DivisorClass.of(1, 1, 1)) == 6


def test_tensor_cube_and_one_based_keys():
    T = TrilinearForm.tensor_cube((1, 2), 2)
    assert T.one_based() == {"111": 2, "112": 4, "122": 8, "222": 16}
    assert cube(T, DivisorClass.of(1, 1)) == 2 * 27


def test_subtraction_cancels():
    T = TrilinearForm.from_mapping(2, {(0, 0, 1): 1, (0, 1, 1): 1})
    assert (T - T).entries == ()
    assert T + T - T == T


def test_validate_rr_integrality_accepts(topological_state):
    result = validate_rr_integrality(topological_state.trilinear, topological_state.c2)
    assert result.accepted
    assert result.witness is None


def test_validate_rr_integrality_rejects_with_witness(topological_state):
    result = validate_rr_integrality(topological_state.trilinear, LinearFormC2((1, 0)))
    assert not result.accepted
    assert result.witness == [1, 0]
    assert result.residue == 1


def test_validate_rr_integrality_on_normal_form(three_lines):
    with pytest.raises(FormsInputError):
        validate_rr_integrality(three_lines, LinearFormC2((1, 1)))
