"""Reader and writer for the line-oriented identity record format.

    id | decls | constraints | lhs | rhs | ref [| status]

``-`` marks an empty decls or constraints field, ``#`` starts a comment and
``[name]`` on its own line opens a catalog section.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

from app.domain.enums import Comparison, SymbolKind
from app.domain.errors import ParseError, RecordFormatError, SourceSpan, UndeclaredSymbolError
from app.domain.expr import Expr, contains, free_symbols, Hyp, Sum
from app.domain.linform import SymbolDecl
from app.domain.models import EXCESS_NAMES, Constraint, IdentityEntry
from app.domain.statuses import EntryStatus

from .parser import parse_expr, parse_linform

logger = logging.getLogger(__name__)

_PAIRS = {"(": ")", "[": "]"}
_TWO_CHAR = ("<=", ">=", "!=")


def split_top_level(text: str, separator: str) -> list[str]:
    parts: list[str] = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch in _PAIRS:
            depth += 1
        elif ch in _PAIRS.values():
            depth -= 1
        elif ch == separator and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return [part.strip() for part in parts]


def parse_decl(text: str, line: int = 1) -> SymbolDecl:
    if ":=" in text:
        name, definition = (part.strip() for part in text.split(":=", 1))
        return SymbolDecl(name, SymbolKind.REAL, definition=str(parse_expr(definition, line)))
    if ":" not in text:
        raise RecordFormatError(f"Declaration {text!r} needs name:kind", SourceSpan(line, 1, 1))
    name, rest = (part.strip() for part in text.split(":", 1))
    lower = upper = None
    if "[" in rest:
        kind_text, bounds = rest.split("[", 1)
        low, high = (part.strip() for part in bounds.rstrip("]").split(","))
        lower = Fraction(low) if low else None
        upper = Fraction(high) if high else None
    else:
        kind_text = rest
    try:
        kind = SymbolKind(kind_text.strip())
    except ValueError as exc:
        raise RecordFormatError(f"Unknown symbol kind {kind_text.strip()!r}", SourceSpan(line, 1, 1)) from exc
    return SymbolDecl(name, kind, lower, upper)


def parse_constraint(text: str, line: int = 1) -> Constraint:
    for parity in (Comparison.EVEN, Comparison.ODD):
        head = f"{parity.value}("
        if text.startswith(head) and text.endswith(")"):
            return Constraint(parity, parse_linform(text[len(head) : -1], line))
    depth = 0
    for i, ch in enumerate(text):
        if ch in _PAIRS:
            depth += 1
        elif ch in _PAIRS.values():
            depth -= 1
        elif depth == 0 and ch in "<>=!":
            op_text = text[i : i + 2] if text[i : i + 2] in _TWO_CHAR else ch
            op = Comparison(op_text)
            left = parse_linform(text[:i], line)
            right = parse_linform(text[i + len(op_text) :], line)
            return Constraint(op, left, right)
    raise RecordFormatError(f"Constraint {text!r} has no comparison", SourceSpan(line, 1, max(len(text), 1)))


def infer_status(rhs: Expr) -> EntryStatus:
    if contains(rhs, lambda node: isinstance(node, Hyp)):
        return EntryStatus.TRANSFORMATION
    if contains(rhs, lambda node: isinstance(node, Sum) and not node.infinite):
        return EntryStatus.SUMMABLE
    return EntryStatus.CLOSED


def _check_declared(entry_id: str, names: Iterable[str], declared: set[str]) -> None:
    for name in sorted(names):
        if name not in declared:
            raise UndeclaredSymbolError(name, entry_id)


def parse_identity_record(text: str, line: int = 1, section: str = "main") -> IdentityEntry:
    fields = [part.strip() for part in text.split("|")]
    if len(fields) not in (6, 7):
        raise RecordFormatError(
            f"Record needs 6 or 7 '|'-separated fields, got {len(fields)}",
            SourceSpan(line, 1, max(len(text), 1)),
        )
    entry_id, decl_text, constraint_text, lhs_text, rhs_text, ref = fields[:6]
    if not entry_id:
        raise RecordFormatError("Record id is empty", SourceSpan(line, 1, 1))
    decls = () if decl_text in ("", "-") else tuple(parse_decl(d, line) for d in split_top_level(decl_text, ","))
    constraints = (
        ()
        if constraint_text in ("", "-")
        else tuple(parse_constraint(c, line) for c in split_top_level(constraint_text, ","))
    )
    lhs = parse_expr(lhs_text, line)
    rhs = parse_expr(rhs_text, line)

    declared = {decl.name for decl in decls}
    if len(declared) != len(decls):
        raise RecordFormatError(f"Duplicate declaration in {entry_id}", SourceSpan(line, 1, 1))
    for decl in decls:
        if decl.definition is not None:
            _check_declared(entry_id, free_symbols(parse_expr(decl.definition)), declared)
    _check_declared(entry_id, free_symbols(lhs) | free_symbols(rhs), declared)
    for constraint in constraints:
        _check_declared(entry_id, constraint.symbols - set(EXCESS_NAMES), declared)

    explicit = len(fields) == 7
    if explicit:
        try:
            status = EntryStatus(fields[6])
        except ValueError as exc:
            raise RecordFormatError(f"Unknown status {fields[6]!r}", SourceSpan(line, 1, 1)) from exc
    else:
        status = infer_status(rhs)
    entry = IdentityEntry(entry_id, decls, constraints, lhs, rhs, ref, status, section, explicit)
    if entry.excess is None and any(c.symbols & set(EXCESS_NAMES) for c in constraints):
        raise RecordFormatError(
            f"{entry_id}: sigma/balance need a single series on the left-hand side",
            SourceSpan(line, 1, max(len(text), 1)),
        )
    return entry


def format_record(entry: IdentityEntry) -> str:
    decls = ",".join(str(d) for d in entry.decls) or "-"
    constraints = ",".join(str(c) for c in entry.constraints) or "-"
    fields = [entry.id, decls, constraints, str(entry.lhs), str(entry.rhs), entry.ref]
    if entry.explicit_status:
        fields.append(entry.status.value)
    return " | ".join(fields)


def iter_records(lines: Iterable[str], default_section: str = "main") -> Iterator[IdentityEntry]:
    section = default_section
    for number, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        if text.startswith("[") and text.endswith("]"):
            section = text[1:-1].strip()
            continue
        try:
            yield parse_identity_record(text, number, section)
        except ParseError:
            logger.error("Bad record", extra={"path": f"line {number}"})
            raise


def load_records(path: str | Path, default_section: str = "main") -> list[IdentityEntry]:
    source = Path(path)
    with source.open(encoding="utf-8") as handle:
        entries = list(iter_records(handle, default_section))
    logger.info("Loaded records", extra={"path": str(source), "records": len(entries)})
    return entries


def dump_records(entries: Iterable[IdentityEntry]) -> str:
    lines: list[str] = []
    section: str | None = None
    for entry in entries:
        if entry.section != section:
            section = entry.section
            lines.append(f"[{section}]")
        lines.append(format_record(entry))
    return "\n".join(lines) + "\n"
