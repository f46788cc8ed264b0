"""
Exact JSON encoding: rationals as "p/q" strings (or safe integers), algebraic
numbers as (poly, interval), rays as {"int": ...} or {"alg": ...}.
"""
import json
import re
from fractions import Fraction
from typing import Any

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from cy3_bounds.algebra.forms import (
    LinearFormC2,
    TrilinearForm,
    UnsupportedRankError,
)
from cy3_bounds.algebra.real_algebraic import RealAlgebraic
from cy3_bounds.entities import DomainError, FormsMode
from cy3_bounds.geometry.cone2 import Cone2
from cy3_bounds.geometry.rays import Ray2
from cy3_bounds.services.flops.flops import FormsState

SAFE_INTEGER = 2 ** 53
_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(-?\d+)\s*)?$")


class DecodeError(DomainError):
    pass


def parse_rational(value: int | str) -> Fraction:
    if isinstance(value, bool):
        raise DecodeError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise DecodeError(f"not a rational: {value!r}")
    match = _RATIONAL.match(value)
    if not match:
        raise DecodeError(f"not a rational: {value!r}")
    numerator, denominator = int(match.group(1)), int(match.group(2) or 1)
    if denominator == 0:
        raise DecodeError(f"zero denominator in {value!r}")
    return Fraction(numerator, denominator)


def parse_integer(value: int | str) -> int:
    parsed = parse_rational(value)
    if parsed.denominator != 1:
        raise DecodeError(f"not an integer: {value!r}")
    return parsed.numerator


def encode_integer(value: int) -> int | str:
    return value if abs(value) < SAFE_INTEGER else str(value)


def encode_rational(value: Fraction | int) -> int | str:
    value = Fraction(value)
    if value.denominator == 1:
        return encode_integer(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def encode_algebraic(value: RealAlgebraic) -> dict:
    return {
        "poly": [encode_integer(c) for c in value.poly],
        "interval": [str(value.lo), str(value.hi)],
    }


def decode_algebraic(data: dict) -> RealAlgebraic:
    try:
        poly = [parse_integer(c) for c in data["poly"]]
        lo, hi = (parse_rational(v) for v in data["interval"])
    except (KeyError, TypeError, ValueError) as e:
        raise DecodeError(f"malformed algebraic number {data!r}") from e
    return RealAlgebraic.from_isolating_interval(poly, lo, hi)


def encode_ray(ray: Ray2) -> dict:
    if ray.is_integral:
        return {"int": [encode_integer(v) for v in ray.vector]}
    return {"alg": {"chart": ray.chart, "sign": ray.sign, "slope": encode_algebraic(ray.slope)}}


def decode_ray(data: dict) -> Ray2:
    try:
        if "int" in data:
            x, y = (parse_integer(v) for v in data["int"])
            return Ray2.integral(x, y)
        alg = data["alg"]
        return Ray2.sloped(int(alg["sign"]), decode_algebraic(alg["slope"]))
    except (KeyError, TypeError, ValueError) as e:
        raise DecodeError(f"malformed ray {data!r}") from e


def encode_cone(cone: Cone2) -> dict:
    return {"lo": encode_ray(cone.ray_lo), "hi": encode_ray(cone.ray_hi)}


def decode_cone(data: dict) -> Cone2:
    try:
        lo, hi = data["lo"], data["hi"]
    except (KeyError, TypeError) as e:
        raise DecodeError(f"malformed cone {data!r}") from e
    return Cone2(decode_ray(lo), decode_ray(hi))


class FormsInstanceModel(BaseModel):
    model_config = ConfigDict(extra="ignore")

    rank: int
    mode: FormsMode = FormsMode.topological
    trilinear: dict[str, int | str]
    c2: list[int]
    id: str | int | None = None

    @field_validator("trilinear")
    @classmethod
    def check_keys(cls, value: dict[str, int | str]) -> dict[str, int | str]:
        for key in value:
            if not key.isdigit() or len(key) != 3:
                raise ValueError(f"tensor key {key!r} must be three 1-based indices")
        return value


def forms_from_model(model: FormsInstanceModel, require_rank_two: bool = True) -> FormsState:
    if require_rank_two and model.rank != 2:
        raise UnsupportedRankError(f"only rank 2 is supported, got rank {model.rank}")
    entries = {}
    for key, value in model.trilinear.items():
        index = tuple(int(ch) - 1 for ch in key)
        if tuple(sorted(index)) != index:
            raise DecodeError(f"tensor key {key!r} is not a sorted index multiset")
        entries[index] = parse_rational(value)
    trilinear = TrilinearForm.from_mapping(model.rank, entries, model.mode)
    return FormsState(trilinear, LinearFormC2(tuple(model.c2)))


def parse_forms_instance(data: Any, require_rank_two: bool = True) -> FormsState:
    try:
        model = FormsInstanceModel.model_validate(data)
    except ValidationError as e:
        raise DecodeError(f"invalid forms instance: {e.errors()[0]['msg']}") from e
    return forms_from_model(model, require_rank_two)


def encode_forms(state: FormsState) -> dict:
    return {
        "rank": state.trilinear.rank,
        "mode": state.trilinear.mode.value,
        "trilinear": {k: encode_rational(v) for k, v in state.trilinear.one_based().items()},
        "c2": [encode_integer(v) for v in state.c2.coeffs],
    }


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False)
