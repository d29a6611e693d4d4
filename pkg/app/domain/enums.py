from __future__ import annotations

from enum import Enum


class SymbolKind(str, Enum):
    """Value domain of a declared symbol."""

    REAL = "real"
    COMPLEX = "complex"
    POSITIVE_INTEGER = "positive-integer"
    NONNEGATIVE_INTEGER = "nonnegative-integer"

    @property
    def is_integer(self) -> bool:
        return self in (SymbolKind.POSITIVE_INTEGER, SymbolKind.NONNEGATIVE_INTEGER)

    @property
    def minimum(self) -> int | None:
        if self is SymbolKind.POSITIVE_INTEGER:
            return 1
        if self is SymbolKind.NONNEGATIVE_INTEGER:
            return 0
        return None


class SeriesKind(str, Enum):
    """Outcome of classifying a unit-argument series at a binding."""

    TERMINATING = "terminating"
    CONVERGENT = "convergent"
    DIVERGENT = "divergent"
    DEGENERATE = "degenerate"


class PolePolicy(str, Enum):
    """What numeric evaluation does at a Gamma or psi pole."""

    ERROR = "error"
    SIGNED_INFINITY = "signed-infinity"


class RuleFamily(str, Enum):
    """Transformation sets usable for orbits and relatedness."""

    THOMAE = "thomae"
    RJRJR = "rjrjr"
    REVERSE = "reverse"

    @classmethod
    def parse_many(cls, text: str) -> frozenset["RuleFamily"]:
        parts = [part.strip().lower() for part in text.replace("+", ",").split(",") if part.strip()]
        return frozenset(cls(part) for part in parts)


class OutputFormat(str, Enum):
    """CLI output flavours."""

    TEXT = "text"
    RECORDS = "records"


class Comparison(str, Enum):
    """Relations allowed in record constraints."""

    EQ = "="
    NE = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="
    EVEN = "even"
    ODD = "odd"

    @property
    def is_parity(self) -> bool:
        return self in (Comparison.EVEN, Comparison.ODD)
