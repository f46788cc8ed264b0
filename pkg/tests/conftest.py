import random

import pytest

from cy3_bounds.algebra.forms import LinearFormC2, TrilinearForm
from cy3_bounds.services.flops.flops import FormsState


@pytest.fixture
def three_lines() -> TrilinearForm:
    """xy(x + y)"""
    return TrilinearForm.from_cubic(0, 1, 1, 0)


@pytest.fixture
def double_root() -> TrilinearForm:
    """x^2 y"""
    return TrilinearForm.from_cubic(0, 1, 0, 0)


@pytest.fixture
def one_real_root() -> TrilinearForm:
    """x^2 y + y^3"""
    return TrilinearForm.from_cubic(0, 1, 0, 1)


@pytest.fixture
def topological_state() -> FormsState:
    """3 x^2 y + 3 x y^2 with c2 = (12, 12); passes Riemann-Roch integrality."""
    T = TrilinearForm.from_mapping(2, {(0, 0, 1): 1, (0, 1, 1): 1})
    return FormsState(T, LinearFormC2((12, 12)))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)
