from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel, PositiveInt, ValidationInfo, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

PROJECT_ROOT = Path(__file__).parents[2]


class EnumerationCaps(BaseModel):
    m_cap: PositiveInt = 1000
    relevant_m_cap: PositiveInt = 10_000
    n_cap: PositiveInt = 10_000
    enumeration_nodes: PositiveInt = 1_000_000
    c2e_cap: PositiveInt = 200
    coefficient_box: PositiveInt = 1_000_000
    class_search: PositiveInt = 64


class Constants(BaseSettings):
    REPORT_SCHEMA: str = "cy3-report/1"
    VERY_AMPLE_MULTIPLES: tuple[int, int] = (10, 14)

    SVG_SIZE: int = 480
    SVG_MARGIN: int = 24
    SVG_COLORS: dict[str, str] = {
        "axis": "#9e9e9e",
        "cubic_root": "#1565c0",
        "hessian_root": "#6a1b9a",
        "p_edge": "#2e7d32",
        "e": "#c62828",
        "delta": "#ef6c00",
        "r": "#00838f",
        "component": "#a5d6a7",
    }


class Settings(BaseSettings):
    DEFAULT_CAPS: EnumerationCaps = EnumerationCaps()

    MU0: str | None = None
    R_CONSTANT: PositiveInt = 1
    C2E_UPPER: int = 0

    SVG_PRECISION: str = "1/1000000"
    JOBS: PositiveInt = 1

    model_config = SettingsConfigDict(
        env_prefix="CY3_",
        env_file=PROJECT_ROOT / "envs/.env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    @field_validator("MU0", "SVG_PRECISION")
    @classmethod
    def check_rational(cls, value: str | None, info: ValidationInfo) -> str | None:
        if value is None:
            return value
        try:
            parsed = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a rational: {value!r}")
        if info.field_name == "SVG_PRECISION" and parsed <= 0:
            raise ValueError(f"svg precision must be positive, got {value!r}")
        return value

    @property
    def mu0(self) -> Fraction | None:
        return None if self.MU0 is None else Fraction(self.MU0)

    @property
    def svg_precision(self) -> Fraction:
        return Fraction(self.SVG_PRECISION)
