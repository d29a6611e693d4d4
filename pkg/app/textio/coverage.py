"""Reader for the label coverage manifest.

    label | entry:<id>[,<id>...]
    label | code:<path>[:<symbol>]
    label | external:<reason>
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from app.domain.errors import RecordFormatError, SourceSpan

logger = logging.getLogger(__name__)

TARGET_KINDS = ("entry", "code", "external")
ROOT = Path(__file__).resolve().parents[2]


@dataclass(frozen=True)
class CoverageRow:
    label: str
    kind: str
    targets: tuple[str, ...]
    section: str = "main"
    line: int = 0


def parse_coverage_line(text: str, line: int = 1, section: str = "main") -> CoverageRow:
    label, sep, target = (part.strip() for part in text.partition("|"))
    if not sep or not label or not target:
        raise RecordFormatError(f"Coverage line {text!r} needs label | target", SourceSpan(line, 1, 1))
    kind, sep, rest = (part.strip() for part in target.partition(":"))
    if kind not in TARGET_KINDS or not sep or not rest:
        column = len(label) + 3
        raise RecordFormatError(f"Unknown coverage target {target!r}", SourceSpan(line, column, column))
    if kind == "entry":
        targets = tuple(part.strip() for part in rest.split(",") if part.strip())
    else:
        targets = (rest,)
    return CoverageRow(label, kind, targets, section, line)


def load_coverage(path: str | Path) -> list[CoverageRow]:
    rows: list[CoverageRow] = []
    section = "main"
    with Path(path).open(encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            if text.startswith("[") and text.endswith("]"):
                section = text[1:-1].strip()
                continue
            rows.append(parse_coverage_line(text, number, section))
    logger.info("Loaded coverage manifest", extra={"path": str(path), "records": len(rows)})
    return rows


def _defines(source: str, symbol: str) -> bool:
    pattern = rf"^(def|class)\s+{re.escape(symbol)}\b|^{re.escape(symbol)}\s*[:=]"
    return re.search(pattern, source, re.MULTILINE) is not None


def coverage_problems(rows: Iterable[CoverageRow], entry_ids: Iterable[str], root: Path = ROOT) -> list[str]:
    """Every way the manifest fails to account for its labels."""
    known = set(entry_ids)
    problems: list[str] = []
    seen: set[str] = set()
    for row in rows:
        if row.label in seen:
            problems.append(f"{row.label}: listed twice")
        seen.add(row.label)
        if row.kind == "entry":
            problems.extend(f"{row.label}: unknown entry {target}" for target in row.targets if target not in known)
        elif row.kind == "code":
            path, _, symbol = row.targets[0].partition(":")
            module = root / path
            if not module.is_file():
                problems.append(f"{row.label}: missing module {path}")
            elif symbol and not _defines(module.read_text(encoding="utf-8"), symbol):
                problems.append(f"{row.label}: {path} does not define {symbol}")
    return problems
