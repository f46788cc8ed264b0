"""
The cubic cup-product form and the linear c2 form on the divisor lattice.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from cy3_bounds.entities import DomainError, FormsMode, ValidationResult

logger = logging.getLogger(__name__)

Index = tuple[int, int, int]


class DimensionMismatchError(DomainError):
    pass


class UnsupportedRankError(DomainError):
    pass


class ZeroClassError(DomainError):
    pass


class FormsInputError(DomainError):
    pass


@dataclass(frozen=True)
class DivisorClass:
    coords: tuple[int, ...]

    def __post_init__(self):
        if not all(isinstance(c, int) for c in self.coords):
            raise FormsInputError(f"divisor class coordinates must be integers: {self.coords}")

    @classmethod
    def of(cls, *coords: int) -> "DivisorClass":
        return cls(tuple(int(c) for c in coords))

    @classmethod
    def parse(cls, text: str) -> "DivisorClass":
        try:
            return cls(tuple(int(part) for part in text.split(",")))
        except ValueError as e:
            raise FormsInputError(f"cannot parse divisor class {text!r}") from e

    @property
    def rank(self) -> int:
        return len(self.coords)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        _check_rank(self.rank, other.rank)
        return DivisorClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        _check_rank(self.rank, other.rank)
        return DivisorClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(tuple(-c for c in self.coords))

    def __mul__(self, k: int) -> "DivisorClass":
        return DivisorClass(tuple(k * c for c in self.coords))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coords)


@dataclass(frozen=True)
class QuadraticForm2:
    """Q(x, y) = a x^2 + 2 b x y + c y^2."""
    a: Fraction
    b: Fraction
    c: Fraction

    def __call__(self, x, y):
        return self.a * x * x + 2 * self.b * x * y + self.c * y * y

    @property
    def discriminant(self) -> Fraction:
        return self.b * self.b - self.a * self.c

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0

    @property
    def binary_coefficients(self) -> tuple[Fraction, Fraction, Fraction]:
        """Coefficients of x^2, xy, y^2."""
        return self.a, 2 * self.b, self.c

    def signature(self) -> tuple[int, int, int]:
        det = self.a * self.c - self.b * self.b
        trace = self.a + self.c
        if det < 0:
            return 1, 1, 0
        if det > 0:
            return (2, 0, 0) if trace > 0 else (0, 2, 0)
        if self.is_zero:
            return 0, 0, 2
        return (1, 0, 1) if trace > 0 else (0, 1, 1)

    def scaled(self, k: Fraction) -> "QuadraticForm2":
        return QuadraticForm2(k * self.a, k * self.b, k * self.c)

    def __add__(self, other: "QuadraticForm2") -> "QuadraticForm2":
        return QuadraticForm2(self.a + other.a, self.b + other.b, self.c + other.c)


@dataclass(frozen=True)
class LinearFormC2:
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not all(isinstance(c, int) for c in self.coeffs):
            raise FormsInputError(f"c2 coefficients must be integers: {self.coeffs}")

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)


@dataclass(frozen=True)
class TrilinearForm:
    """
    Symmetric 3-tensor stored by sorted index triples (0-based); missing
    entries are zero.
    """
    rank: int
    entries: tuple[tuple[Index, Fraction], ...]
    mode: FormsMode = FormsMode.topological
    _table: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.rank < 1:
            raise FormsInputError("rank must be positive")
        table = {}
        for index, value in self.entries:
            key = tuple(sorted(index))
            if len(key) != 3 or any(not 0 <= i < self.rank for i in key):
                raise FormsInputError(f"invalid tensor index {index} for rank {self.rank}")
            value = Fraction(value)
            if self.mode == FormsMode.topological and value.denominator != 1:
                raise FormsInputError(f"topological cup product {index} is not an integer: {value}")
            table[key] = value
        canonical = tuple(sorted((k, v) for k, v in table.items() if v != 0))
        object.__setattr__(self, "entries", canonical)
        object.__setattr__(self, "_table", dict(canonical))

    @classmethod
    def from_mapping(
            cls, rank: int, values: Mapping[Index, int | Fraction],
            mode: FormsMode = FormsMode.topological) -> "TrilinearForm":
        return cls(rank, tuple((tuple(k), Fraction(v)) for k, v in values.items()), mode)

    @classmethod
    def from_cubic(
            cls, a: int | Fraction, b: int | Fraction, c: int | Fraction, d: int | Fraction,
            mode: FormsMode = FormsMode.normal_form) -> "TrilinearForm":
        """Polarization of a x^3 + b x^2 y + c x y^2 + d y^3."""
        return cls.from_mapping(
            2,
            {(0, 0, 0): Fraction(a), (0, 0, 1): Fraction(b) / 3,
             (0, 1, 1): Fraction(c) / 3, (1, 1, 1): Fraction(d)},
            mode,
        )

    @classmethod
    def tensor_cube(cls, eta: tuple[int, ...], scale: int | Fraction = 1,
                    mode: FormsMode = FormsMode.topological) -> "TrilinearForm":
        """scale * (eta x eta x eta)."""
        rank = len(eta)
        values = {
            key: Fraction(scale) * eta[key[0]] * eta[key[1]] * eta[key[2]]
            for key in itertools.combinations_with_replacement(range(rank), 3)
        }
        return cls.from_mapping(rank, values, mode)

    def entry(self, i: int, j: int, k: int) -> Fraction:
        return self._table.get(tuple(sorted((i, j, k))), Fraction(0))

    def __add__(self, other: "TrilinearForm") -> "TrilinearForm":
        _check_rank(self.rank, other.rank)
        keys = set(self._table) | set(other._table)
        return TrilinearForm.from_mapping(
            self.rank, {k: self._table.get(k, 0) + other._table.get(k, 0) for k in keys}, self.mode
        )

    def __sub__(self, other: "TrilinearForm") -> "TrilinearForm":
        _check_rank(self.rank, other.rank)
        keys = set(self._table) | set(other._table)
        return TrilinearForm.from_mapping(
            self.rank, {k: self._table.get(k, 0) - other._table.get(k, 0) for k in keys}, self.mode
        )

    def one_based(self) -> dict[str, Fraction]:
        """Entries keyed by 1-based sorted index strings such as "112"."""
        return {
            "".join(str(i + 1) for i in key): self.entry(*key)
            for key in itertools.combinations_with_replacement(range(self.rank), 3)
        }


def _check_rank(*ranks: int) -> None:
    if len(set(ranks)) != 1:
        raise DimensionMismatchError(f"rank mismatch: {ranks}")


def require_rank_two(T: TrilinearForm) -> None:
    if T.rank != 2:
        raise UnsupportedRankError(f"only rank 2 is supported, got rank {T.rank}")


def triple(T: TrilinearForm, D1: DivisorClass, D2: DivisorClass, D3: DivisorClass) -> Fraction:
    return triple_vectors(T, D1.coords, D2.coords, D3.coords)


def triple_vectors(T: TrilinearForm, u: Iterable, v: Iterable, w: Iterable):
    """Polarized product for arbitrary coordinate vectors (rationals or sympy expressions)."""
    u, v, w = tuple(u), tuple(v), tuple(w)
    _check_rank(T.rank, len(u), len(v), len(w))
    total = 0
    for (i, j, k) in itertools.product(range(T.rank), repeat=3):
        value = T.entry(i, j, k)
        if value:
            total += value * u[i] * v[j] * w[k]
    return total


def cube(T: TrilinearForm, D: DivisorClass) -> Fraction:
    return triple(T, D, D, D)


def c2_eval(c: LinearFormC2, D: DivisorClass) -> int:
    _check_rank(c.rank, D.rank)
    return sum(a * b for a, b in zip(c.coeffs, D.coords))


def quad_form_vector(T: TrilinearForm, e: tuple) -> QuadraticForm2:
    require_rank_two(T)
    a = triple_vectors(T, e, (1, 0), (1, 0))
    b = triple_vectors(T, e, (1, 0), (0, 1))
    c = triple_vectors(T, e, (0, 1), (0, 1))
    return QuadraticForm2(a, b, c)


def quad_form(T: TrilinearForm, E: DivisorClass) -> QuadraticForm2:
    """Q(L) = T(E, L, L)."""
    _check_rank(T.rank, E.rank)
    return quad_form_vector(T, E.coords)


def index_signature(T: TrilinearForm, D: DivisorClass) -> tuple[int, int, int]:
    if D.is_zero:
        raise ZeroClassError("index signature of the zero class")
    return quad_form(T, D).signature()


def cubic_coefficients(T: TrilinearForm) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Coefficients (a, b, c, d) of F = a x^3 + b x^2 y + c x y^2 + d y^3."""
    require_rank_two(T)
    return T.entry(0, 0, 0), 3 * T.entry(0, 0, 1), 3 * T.entry(0, 1, 1), T.entry(1, 1, 1)


def hessian_form(T: TrilinearForm) -> QuadraticForm2:
    """
    det M(D) as a binary quadratic in D, where M(D)_ij = T(D, e_i, e_j).
    Negative exactly where quad_form(T, D) is indefinite.
    """
    require_rank_two(T)
    p = (T.entry(0, 0, 0), T.entry(1, 0, 0))
    q = (T.entry(0, 0, 1), T.entry(1, 0, 1))
    r = (T.entry(0, 1, 1), T.entry(1, 1, 1))
    xx = p[0] * r[0] - q[0] * q[0]
    xy = p[0] * r[1] + p[1] * r[0] - 2 * q[0] * q[1]
    yy = p[1] * r[1] - q[1] * q[1]
    return QuadraticForm2(xx, xy / 2, yy)


def rr_residue(T: TrilinearForm, c: LinearFormC2, D: DivisorClass) -> Fraction:
    return (2 * cube(T, D) + c2_eval(c, D)) % 12


def validate_rr_integrality(T: TrilinearForm, c: LinearFormC2) -> ValidationResult:
    """
    Checks 2 D^3 + c2.D = 0 (mod 12) on the classes with coordinates in {0, 1, 2}.
    The residue is a cubic polynomial in the coordinates; its Newton coefficients
    up to total degree 3 are differences over this set, so the check is exact.
    """
    _check_rank(T.rank, c.rank)
    if T.mode != FormsMode.topological:
        raise FormsInputError("integrality is only defined for topological forms")
    for coords in itertools.product(range(3), repeat=T.rank):
        D = DivisorClass(coords)
        residue = rr_residue(T, c, D)
        if residue != 0:
            logger.info(f"Riemann-Roch integrality fails at {D} with residue {residue}")
            return ValidationResult(accepted=False, witness=list(coords), residue=int(residue))
    return ValidationResult(accepted=True)
