from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """1-based location of a token inside a parsed line."""

    line: int
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError("span start must not exceed end")

    def __str__(self) -> str:
        return f"{self.line}:{self.start}-{self.end}"


class HypError(ValueError):
    """Root of every toolkit error."""


# Text layer


class ParseError(HypError):
    def __init__(self, message: str, span: SourceSpan | None = None) -> None:
        self.span = span
        where = f" at {span}" if span else ""
        super().__init__(f"{message}{where}")


class UnknownFunctionError(ParseError):
    pass


class RecordFormatError(ParseError):
    pass


class UndeclaredSymbolError(HypError):
    def __init__(self, name: str, entry_id: str | None = None) -> None:
        self.name = name
        self.entry_id = entry_id
        where = f" in {entry_id}" if entry_id else ""
        super().__init__(f"Undeclared symbol {name!r}{where}")


# Evaluation


class EvaluationError(HypError):
    """Any failure while computing a value."""


class UnboundSymbolError(EvaluationError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"Symbol {name!r} is not bound")


class PoleError(EvaluationError):
    def __init__(self, function: str, argument: object) -> None:
        self.function = function
        self.argument = argument
        super().__init__(f"{function} has a pole at {argument}")


class NonIntegerSignError(EvaluationError):
    def __init__(self, exponent: object) -> None:
        self.exponent = exponent
        super().__init__(f"(-1)^x needs an integer exponent, got {exponent}")


class NonCancellingPoleError(EvaluationError):
    pass


class DegenerateSeriesError(EvaluationError):
    pass


class DivergentSeriesError(EvaluationError):
    pass


class ExcessTooSmallError(EvaluationError):
    def __init__(self, excess: object, minimum: object) -> None:
        self.excess = excess
        self.minimum = minimum
        super().__init__(f"Parametric excess {excess} is below the certified minimum {minimum}")


class ConvergenceError(EvaluationError):
    pass


class ConstraintViolationError(EvaluationError):
    pass


# Transformations and search


class RuleNotApplicableError(HypError):
    pass


class IncompleteClosureError(HypError):
    def __init__(self, depth: int, size: int) -> None:
        self.depth = depth
        self.size = size
        super().__init__(f"Orbit not closed after depth {depth} ({size} members)")


class PatternMismatchError(HypError):
    pass


# Catalog, verification and storage


class UnknownEntryError(HypError):
    def __init__(self, entry_id: str) -> None:
        self.entry_id = entry_id
        super().__init__(f"Unknown entry {entry_id}")


class NoAdmissibleBindingError(HypError):
    def __init__(self, entry_id: str, attempts: int) -> None:
        self.entry_id = entry_id
        self.attempts = attempts
        super().__init__(f"No admissible binding for {entry_id} after {attempts} attempts")


class DuplicateRecordError(HypError):
    def __init__(self, existing_id: str) -> None:
        self.existing_id = existing_id
        super().__init__(f"Duplicate record; already stored as {existing_id}")
