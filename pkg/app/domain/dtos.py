from __future__ import annotations

from decimal import Decimal
from typing import Dict, List

from pydantic import BaseModel, Field, computed_field, field_validator

from .statuses import EntryStatus


class TrialFailure(BaseModel):
    """A binding at which the two sides disagree, or could not be compared."""

    binding: Dict[str, str]
    residual: str = Field(..., description="Relative residual, or 'nan' when evaluation failed")
    reason: str | None = None


class VerifyReport(BaseModel):
    """Outcome of sampling an entry, relation or chain."""

    entry_id: str
    trials: int = 0
    max_residual: str = "0"
    failures: List[TrialFailure] = Field(default_factory=list)
    precision: int
    tolerance: Decimal
    exact_trials: int = Field(default=0, description="Trials decided by exact rational arithmetic")
    status: EntryStatus | None = None

    @field_validator("tolerance", mode="before")
    @classmethod
    def _validate_tolerance(cls, value: object) -> Decimal:
        tol = Decimal(str(value))
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        return tol

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return not self.failures and self.trials > 0

    def as_record(self) -> str:
        verdict = "ok" if self.passed else "FAIL"
        return (
            f"{self.entry_id} | {verdict} | trials={self.trials} | exact={self.exact_trials} | "
            f"max_residual={self.max_residual} | prec={self.precision} | failures={len(self.failures)}"
        )


class ScanCandidate(BaseModel):
    """Three-part relation instance with all but one term known."""

    relation: str
    unresolved: str = Field(..., description="Printed spec of the unknown term")
    known: List[str] = Field(default_factory=list, description="Record ids used")
    expression: str = Field(..., description="Closed expression for the unknown term")
