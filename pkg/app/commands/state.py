from __future__ import annotations

import functools
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, TypeVar

import click

from app.config import Settings
from app.domain.enums import OutputFormat, SymbolKind
from app.domain.errors import (
    DuplicateRecordError,
    EvaluationError,
    HypError,
    ParseError,
    PatternMismatchError,
    RuleNotApplicableError,
    UndeclaredSymbolError,
    UnknownEntryError,
)
from app.domain.expr import Expr, free_symbols
from app.domain.linform import SymbolDecl
from app.domain.models import IdentityEntry
from app.repositories.catalog_store import InMemoryCatalogStore
from app.repositories.db_store import FlatFileDbStore
from app.services.catalog_service import CatalogService
from app.services.contiguity_service import ContiguityService
from app.services.db_service import DbService
from app.services.orbit_service import OrbitService
from app.services.verify_service import VerifyService
from app.textio.parser import parse_linform
from app.textio.records import format_record

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_EVALUATION = 3

# Errors that mean the request itself was wrong rather than the mathematics.
USAGE_ERRORS = (
    ParseError,
    UndeclaredSymbolError,
    UnknownEntryError,
    RuleNotApplicableError,
    PatternMismatchError,
    DuplicateRecordError,
)

F = TypeVar("F", bound=Callable[..., Any])


@dataclass
class CliState:
    """Per-invocation settings and lazily built services."""

    settings: Settings
    output: OutputFormat = OutputFormat.TEXT
    batch: bool = False
    _catalog: InMemoryCatalogStore | None = field(default=None, repr=False)

    @property
    def records(self) -> bool:
        return self.output is OutputFormat.RECORDS

    @property
    def catalog(self) -> InMemoryCatalogStore:
        if self._catalog is None:
            self._catalog = InMemoryCatalogStore.from_files(
                self.settings.catalog_path, self.settings.relations_path
            )
        return self._catalog

    def catalog_service(self) -> CatalogService:
        return CatalogService(self.catalog, self.settings)

    def contiguity_service(self) -> ContiguityService:
        return ContiguityService(self.catalog, self.settings)

    def orbit_service(self) -> OrbitService:
        return OrbitService(self.settings)

    def verify_service(self) -> VerifyService:
        return VerifyService(self.catalog, self.settings)

    def db_service(self) -> DbService:
        return DbService(FlatFileDbStore(self.settings.db_path), self.catalog, self.settings)

    def inputs(self, value: str | None) -> Iterator[str]:
        """The positional argument, or one stripped line per stdin line in batch mode."""
        if self.batch:
            for line in click.get_text_stream("stdin"):
                text = line.split("#", 1)[0].strip()
                if text:
                    yield text
            return
        if value is None:
            raise click.UsageError("Missing argument (or pass --stdin)")
        yield value


pass_state = click.make_pass_decorator(CliState)


def guarded(func: F) -> F:
    """Map toolkit errors onto the exit-code table."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except USAGE_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_USAGE)
        except (EvaluationError, HypError) as exc:
            logger.debug("Command failed", extra={"verb": func.__name__})
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_EVALUATION)
        except ValueError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_USAGE)

    return wrapper  # type: ignore[return-value]


def parse_binding(items: Iterable[str]) -> dict[str, Fraction]:
    binding: dict[str, Fraction] = {}
    for item in items:
        for part in item.split(","):
            if not part.strip():
                continue
            name, sep, value = part.partition("=")
            if not sep:
                raise click.BadParameter(f"Expected name=value, got {part!r}")
            form = parse_linform(value)
            if not form.is_constant:
                raise click.BadParameter(f"{name.strip()} must be bound to a rational")
            binding[name.strip()] = form.constant
    return binding


def parse_names(items: Iterable[str]) -> frozenset[str]:
    return frozenset(name.strip() for item in items for name in item.split(",") if name.strip())


def identity_line(
    entry_id: str,
    lhs: Expr,
    rhs: Expr,
    note: str = "",
    integers: Iterable[str] = (),
) -> str:
    """One record declaring every free symbol, so the line re-parses."""
    ints = set(integers)
    names = sorted(free_symbols(lhs) | free_symbols(rhs))
    decls = tuple(
        SymbolDecl(name, SymbolKind.NONNEGATIVE_INTEGER if name in ints else SymbolKind.REAL) for name in names
    )
    ref = note.replace("|", "/").replace("#", "no.")
    return format_record(IdentityEntry(entry_id, decls, (), lhs, rhs, ref))
