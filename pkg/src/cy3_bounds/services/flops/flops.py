import logging
from collections import Counter
from dataclasses import dataclass
from math import gcd
from typing import Mapping, Sequence

from cy3_bounds.algebra.forms import (
    DimensionMismatchError,
    FormsInputError,
    LinearFormC2,
    TrilinearForm,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlopData:
    """
    A flop with primitive class eta and n_d flopping (-1,-1)-curves of degree d.
    counts is kept as sorted (d, n_d) pairs.
    """
    eta: tuple[int, ...]
    counts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.eta or gcd(*self.eta) != 1:
            raise FormsInputError(f"eta must be primitive, got {self.eta}")
        if not self.counts:
            raise FormsInputError("flop data needs at least one curve count")
        merged = Counter()
        for d, n in self.counts:
            if d <= 0 or n <= 0:
                raise FormsInputError(f"curve degree and count must be positive, got {d}:{n}")
            merged[d] += n
        object.__setattr__(self, "counts", tuple(sorted(merged.items())))

    @classmethod
    def of(cls, eta: Sequence[int], counts: Mapping[int, int]) -> "FlopData":
        return cls(tuple(eta), tuple(counts.items()))

    @classmethod
    def parse(cls, eta_text: str, counts_text: str) -> "FlopData":
        """Parses "--eta 1,0 --nd 1:2,2:1"."""
        try:
            eta = tuple(int(x) for x in eta_text.split(","))
            counts = tuple(
                (int(d), int(n)) for d, n in (item.split(":") for item in counts_text.split(","))
            )
        except ValueError as e:
            raise FormsInputError(f"cannot parse flop data {eta_text!r} {counts_text!r}") from e
        return cls(eta, counts)

    @property
    def n1(self) -> int:
        return sum(n * d for d, n in self.counts)

    @property
    def n3(self) -> int:
        return sum(n * d ** 3 for d, n in self.counts)


@dataclass(frozen=True)
class FormsState:
    trilinear: TrilinearForm
    c2: LinearFormC2

    def __post_init__(self):
        if self.trilinear.rank != self.c2.rank:
            raise DimensionMismatchError(
                f"trilinear rank {self.trilinear.rank} does not match c2 rank {self.c2.rank}"
            )


@dataclass(frozen=True)
class FlopStep:
    eta: tuple[int, ...]
    n1: int
    n3: int


def apply_flop(s: FormsState, f: FlopData) -> FormsState:
    """
    T'(D1, D2, D3) = T(D1, D2, D3) - eta(D1) eta(D2) eta(D3) N3
    c2'(D) = c2(D) + 2 eta(D) N1
    """
    if len(f.eta) != s.trilinear.rank:
        raise DimensionMismatchError(f"eta has length {len(f.eta)}, forms have rank {s.trilinear.rank}")
    correction = TrilinearForm.tensor_cube(f.eta, f.n3, s.trilinear.mode)
    trilinear = s.trilinear - correction
    c2 = LinearFormC2(tuple(c + 2 * e * f.n1 for c, e in zip(s.c2.coeffs, f.eta)))
    return FormsState(trilinear, c2)


def inverse(f: FlopData) -> FlopData:
    return FlopData(tuple(-e for e in f.eta), f.counts)


def apply_sequence(s: FormsState, fs: Sequence[FlopData]) -> tuple[FormsState, list[FlopStep]]:
    log = []
    for f in fs:
        s = apply_flop(s, f)
        log.append(FlopStep(f.eta, f.n1, f.n3))
    logger.debug(f"applied {len(log)} flops")
    return s, log
