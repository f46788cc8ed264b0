"""
Invariants (E^3, c2.E) of candidate rigid non-movable surfaces and the integral
classes realizing them.

A flop with E'.eta = k and n_d curves of degree d shifts c2.E by 2 k n_d d and
E^3 by -(k d)^3 n_d, so every correction is a multiset of positive integers j,
each adding 2 j to c2.E and removing j^3 from E^3.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import sympy
from sympy.core.numbers import igcdex

from cy3_bounds.algebra.forms import (
    DivisorClass,
    FormsInputError,
    LinearFormC2,
    TrilinearForm,
    cubic_coefficients,
    require_rank_two,
)
from cy3_bounds.algebra.real_algebraic import isolate_real_roots, to_sympy_rational
from cy3_bounds.entities import DomainError, MinimalModelKind
from cy3_bounds.services.flops.flops import FlopData, FormsState, apply_sequence

logger = logging.getLogger(__name__)

TYPE_II_C2E = (-6, 10)
TYPE_III_C2E_MIN = -4
TYPE_II_MAX_CUBE = 9
TYPE_III_MAX_CUBE = 8


class EnumerationCapExceeded(DomainError):
    pass


class ParityError(DomainError):
    pass


@dataclass(frozen=True)
class FlopCorrection:
    eta_pairing: int
    counts: tuple[tuple[int, int], ...]

    @property
    def n1(self) -> int:
        return sum(n * d for d, n in self.counts)

    @property
    def n3(self) -> int:
        return sum(n * d ** 3 for d, n in self.counts)

    @property
    def c2_shift(self) -> int:
        return 2 * self.eta_pairing * self.n1

    @property
    def cube_shift(self) -> int:
        return -self.eta_pairing ** 3 * self.n3

    def as_flop(self) -> FlopData:
        """A rank-2 flop whose eta pairs to eta_pairing with the first basis class."""
        return FlopData((self.eta_pairing, 1), self.counts)


@dataclass(frozen=True)
class SurfacePairCandidate:
    e_cubed: int
    c2_e: int
    kind: MinimalModelKind | None = field(compare=False)
    root: tuple[int, int] = field(compare=False)
    corrections: tuple[FlopCorrection, ...] = field(default=(), compare=False)

    @property
    def provenance(self) -> str:
        origin = self.kind.value if self.kind else "given"
        text = f"{origin} root ({self.root[0]}, {self.root[1]})"
        for correction in self.corrections:
            parts = ", ".join(f"{d}:{n}" for d, n in correction.counts)
            text += f" + flop(E.eta={correction.eta_pairing}; {parts})"
        return text

    @property
    def flop_curves(self) -> int:
        return sum(n for c in self.corrections for _, n in c.counts)

    def replay(self) -> tuple[int, int]:
        """
        Recomputes (E^3, c2.E) by flopping a model whose first basis class
        carries the root invariants.
        """
        e3, c2e = self.root
        state = FormsState(
            TrilinearForm.from_mapping(2, {(0, 0, 0): e3}),
            LinearFormC2((c2e, 0)),
        )
        state, _ = apply_sequence(state, [c.as_flop() for c in self.corrections])
        return int(state.trilinear.entry(0, 0, 0)), state.c2.coeffs[0]


@dataclass(frozen=True)
class SurfaceClassCandidate:
    divisor: DivisorClass
    pair: SurfacePairCandidate
    degenerate: bool = False
    direction: DivisorClass | None = None


def minimal_model_pairs(c2e_upper: int) -> list[tuple[int, int, MinimalModelKind]]:
    """
    Roots (e'^3, c2.e', kind) with 2 e'^3 + c2.e' = 12 and c2.e' <= c2e_upper.
    """
    pairs = []
    for c2e in range(TYPE_II_C2E[0], c2e_upper + 1, 2):
        if c2e <= TYPE_II_C2E[1]:
            pairs.append(((12 - c2e) // 2, c2e, MinimalModelKind.type_ii))
        if c2e >= TYPE_III_C2E_MIN:
            pairs.append(((12 - c2e) // 2, c2e, MinimalModelKind.type_iii_g0))
    return pairs


def _partitions(total: int, largest: int | None = None) -> Iterator[list[int]]:
    """Partitions of total into non-increasing positive parts."""
    largest = total if largest is None else largest
    if total == 0:
        yield []
        return
    for part in range(min(total, largest), 0, -1):
        for rest in _partitions(total - part, part):
            yield [part] + rest


def _cube_bounded_multisets(limit: int, largest: int | None = None) -> Iterator[list[int]]:
    """Non-increasing lists of positive integers whose cubes sum to at most limit."""
    yield []
    part = 1
    while part ** 3 <= limit and (largest is None or part <= largest):
        for rest in _cube_bounded_multisets(limit - part ** 3, part):
            yield [part] + rest
        part += 1


def _correction(parts: list[int]) -> tuple[FlopCorrection, ...]:
    if not parts:
        return ()
    return (FlopCorrection(1, tuple(sorted(Counter(parts).items()))),)


class _NodeCounter:
    def __init__(self, cap: int):
        self.cap = cap
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.cap:
            raise EnumerationCapExceeded(f"surface enumeration exceeded {self.cap} nodes")


def _keep_simplest(found: dict, candidate: SurfacePairCandidate) -> None:
    key = (candidate.e_cubed, candidate.c2_e)
    if key not in found or candidate.flop_curves < found[key].flop_curves:
        found[key] = candidate


def _sorted_pairs(found: dict) -> list[SurfacePairCandidate]:
    return sorted(found.values(), key=lambda p: (p.c2_e, -p.e_cubed))


def enumerate_pairs(c2e_upper: int, node_cap: int = 1_000_000) -> list[SurfacePairCandidate]:
    """
    All (E^3, c2.E) with c2.E <= c2e_upper reachable from a minimal model by
    flop corrections, deduplicated by value.
    """
    counter = _NodeCounter(node_cap)
    found = {}
    for e3, c2e, kind in minimal_model_pairs(c2e_upper):
        for shift in range(0, (c2e_upper - c2e) // 2 + 1):
            for parts in _partitions(shift):
                counter.tick()
                candidate = SurfacePairCandidate(
                    e3 - sum(j ** 3 for j in parts), c2e + 2 * shift, kind, (e3, c2e), _correction(parts)
                )
                _keep_simplest(found, candidate)
    logger.debug(f"{len(found)} surface pairs with c2.E <= {c2e_upper} in {counter.nodes} nodes")
    return _sorted_pairs(found)


def enumerate_pairs_by_cube(
        e3_lower: int, c2e_cap: int, node_cap: int = 1_000_000) -> list[SurfacePairCandidate]:
    """
    All candidates with E^3 >= e3_lower. Corrections only lower E^3, so the
    roots and the corrections are both finite; c2e_cap guards the search.
    """
    counter = _NodeCounter(node_cap)
    found = {}
    roots = []
    for e3 in range(TYPE_II_MAX_CUBE, e3_lower - 1, -1):
        if e3 >= 1:
            roots.append((e3, 12 - 2 * e3, MinimalModelKind.type_ii))
        if e3 <= TYPE_III_MAX_CUBE:
            roots.append((e3, 12 - 2 * e3, MinimalModelKind.type_iii_g0))
    for e3, c2e, kind in roots:
        for parts in _cube_bounded_multisets(e3 - e3_lower):
            counter.tick()
            candidate = SurfacePairCandidate(
                e3 - sum(j ** 3 for j in parts), c2e + 2 * sum(parts), kind, (e3, c2e), _correction(parts)
            )
            if candidate.c2_e > c2e_cap:
                raise EnumerationCapExceeded(
                    f"candidate with c2.E = {candidate.c2_e} exceeds the cap {c2e_cap}"
                )
            _keep_simplest(found, candidate)
    return _sorted_pairs(found)


def neg18_filter(p: SurfacePairCandidate) -> bool:
    """E^3 + (c2.E / 2)^3 >= -18."""
    if p.c2_e % 2:
        raise ParityError(f"c2.E = {p.c2_e} is odd")
    return p.e_cubed + Fraction(p.c2_e, 2) ** 3 >= -18


def _slope_exceptions(k1: Fraction, k2: Fraction, denom_bound: int, node_cap: int) -> Iterator[Fraction]:
    """
    Ratios b/a over E = (a, -b) with -k1 a^2 b + k2^3 a^3 / 8 >= -18 and b > c a.
    Such a satisfy k1 c a^3 < 36.
    """
    c = k2 ** 3 / (4 * k1)
    counter = _NodeCounter(node_cap)
    for q in range(1, denom_bound + 1):
        p = 1
        while k1 * c * Fraction(p, q) ** 3 < 36:
            counter.tick()
            a = Fraction(p, q)
            b_max = c * a / 2 + 18 / (k1 * a * a)
            b = max(Fraction(int(b_max * r), r) for r in range(1, denom_bound + 1))
            if b > c * a:
                yield b / a
            p += 1


def case_b_slope_bound(
        k1: Fraction, k2: Fraction, denom_bound: int, node_cap: int = 1_000_000) -> Fraction:
    """
    A slope c' >= k2^3 / (4 k1) with b <= c' a for every candidate class
    E = (a, -b) of the normal scaling k1 x^2 y, c2 = k2 x.
    """
    k1, k2 = Fraction(k1), Fraction(k2)
    if k1 <= 0 or k2 <= 0:
        raise FormsInputError("k1 and k2 must be positive")
    if denom_bound <= 0:
        raise FormsInputError("denominator bound must be positive")
    c = k2 ** 3 / (4 * k1)
    return max([c, *_slope_exceptions(k1, k2, denom_bound, node_cap)])


def solve_classes(
        T: TrilinearForm, c: LinearFormC2, pair: tuple[int, int] | SurfacePairCandidate,
) -> list[SurfaceClassCandidate]:
    """
    Integral E with E^3 = e3 and c2.E = c2e, found on the line c2.E = c2e.
    The zero class is never a surface class.
    """
    require_rank_two(T)
    if c.is_zero:
        raise FormsInputError("c2 is identically zero")
    if isinstance(pair, SurfacePairCandidate):
        candidate = pair
    else:
        e3, c2e = pair
        candidate = SurfacePairCandidate(e3, c2e, None, (e3, c2e))
    c1, c2 = c.coeffs
    u, v, g = igcdex(c1, c2)
    u, v, g = int(u), int(v), int(g)
    if g < 0:
        u, v, g = -u, -v, -g
    if candidate.c2_e % g:
        return []
    x0, y0 = u * candidate.c2_e // g, v * candidate.c2_e // g
    dx, dy = c2 // g, -c1 // g

    s = sympy.Symbol("s")
    a, b, cc, d = (to_sympy_rational(value) for value in cubic_coefficients(T))
    x, y = x0 + s * dx, y0 + s * dy
    restricted = sympy.Poly(
        sympy.expand(a * x ** 3 + b * x ** 2 * y + cc * x * y ** 2 + d * y ** 3 - candidate.e_cubed), s
    )
    if restricted.is_zero:
        logger.info(f"E^3 is constant along c2.E = {candidate.c2_e}; returning the line family")
        return [SurfaceClassCandidate(DivisorClass((x0, y0)), candidate, True, DivisorClass((dx, dy)))]
    coeffs = [sympy.Rational(value) for value in reversed(restricted.all_coeffs())]
    classes = []
    for root in isolate_real_roots([Fraction(int(q.p), int(q.q)) for q in coeffs]):
        if root.is_rational and root.value.denominator == 1:
            t = int(root.value)
            D = DivisorClass((x0 + t * dx, y0 + t * dy))
            if not D.is_zero:
                classes.append(D)
    return [SurfaceClassCandidate(D, candidate) for D in sorted(classes, key=lambda D: D.coords)]
