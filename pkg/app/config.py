from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

DATA_DIR = Path(__file__).resolve().parent / "data"


class Settings(BaseSettings):
    """Toolkit configuration read from environment variables."""

    # General
    app_env: str = "local"  # e.g. local, ci
    log_level: str = "INFO"

    # Numerics
    precision: int = Field(default=40, ge=20)  # decimal digits
    guard_digits: int = Field(default=10, ge=2)
    tail_terms: int = Field(default=500, ge=1)  # minimum partial-sum length behind the tail bound
    tolerance: Decimal = Decimal("1e-30")
    series_tolerance: Decimal = Decimal("1e-15")  # statements with sum(k,lo,inf,...)
    sigma_min: str = "1/2"  # smallest excess accepted for infinite sums
    pole_margin: str = "1/20"

    # Sampling / verification
    seed: int = 20240601
    trials: int = 10
    max_attempts: int = 400
    real_range: str = "-3,4"  # default window for real symbols
    int_upper: int = 6

    # Orbit search
    max_depth: int = 6

    # Data files
    catalog_path: str = str(DATA_DIR / "catalog.txt")
    relations_path: str = str(DATA_DIR / "contiguity.txt")
    coverage_path: str = str(DATA_DIR / "coverage.txt")
    db_path: str = str(DATA_DIR / "database.txt")

    @field_validator("sigma_min", "pole_margin")
    @classmethod
    def _check_rational(cls, value: str) -> str:
        Fraction(value)
        return value

    @field_validator("real_range")
    @classmethod
    def _check_range(cls, value: str) -> str:
        low, high = (Fraction(part) for part in value.split(","))
        if low >= high:
            raise ValueError("real_range must be increasing")
        return value

    @property
    def sigma_min_value(self) -> Fraction:
        return Fraction(self.sigma_min)

    @property
    def pole_margin_value(self) -> Fraction:
        return Fraction(self.pole_margin)

    @property
    def real_window(self) -> tuple[Fraction, Fraction]:
        low, high = (Fraction(part) for part in self.real_range.split(","))
        return low, high

    # Pydantic v2 settings config
    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )


settings = Settings()
