from __future__ import annotations

import pathlib
import sys

import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from app.config import settings
from app.domain.errors import RecordFormatError
from app.repositories.catalog_store import InMemoryCatalogStore
from app.repositories.db_store import FlatFileDbStore
from app.textio.coverage import coverage_problems, load_coverage, parse_coverage_line


def test_parse_entry_list() -> None:
    row = parse_coverage_line("We1 | entry:we1, we2", line=4, section="thomae-variants")
    assert row.kind == "entry"
    assert row.targets == ("we1", "we2")
    assert (row.section, row.line) == ("thomae-variants", 4)


def test_parse_code_and_external() -> None:
    assert parse_coverage_line("Leg | code:app/numerics/numeval.py:gamma_ratio_limit_exact").targets == (
        "app/numerics/numeval.py:gamma_ratio_limit_exact",
    )
    assert parse_coverage_line("Eq | external:integral only").kind == "external"


@pytest.mark.parametrize("text", ["Lonely", "X | table:1", "X | entry:"])
def test_malformed_lines(text: str) -> None:
    with pytest.raises(RecordFormatError):
        parse_coverage_line(text)


def test_problems_are_reported() -> None:
    rows = [
        parse_coverage_line("A | entry:gauss,nope"),
        parse_coverage_line("A | external:again"),
        parse_coverage_line("B | code:app/missing.py"),
        parse_coverage_line("C | code:app/numerics/psi_rational.py:no_such_function"),
        parse_coverage_line("D | code:app/numerics/psi_rational.py:psi_rational"),
    ]
    problems = coverage_problems(rows, {"gauss"})
    assert problems == [
        "A: unknown entry nope",
        "A: listed twice",
        "B: missing module app/missing.py",
        "C: app/numerics/psi_rational.py does not define no_such_function",
    ]


def test_manifest_sections(tmp_path: pathlib.Path) -> None:
    path = tmp_path / "coverage.txt"
    path.write_text("# header\n[first]\nA | entry:x  # trailing\n\n[second]\nB | external:why\n", encoding="utf-8")
    rows = load_coverage(path)
    assert [(row.label, row.section, row.line) for row in rows] == [("A", "first", 3), ("B", "second", 6)]


def test_shipped_manifest_is_complete() -> None:
    rows = load_coverage(settings.coverage_path)
    known = set(InMemoryCatalogStore.shipped().by_id) | {entry.id for entry in FlatFileDbStore().load()}
    assert coverage_problems(rows, known) == []
    assert len({row.label for row in rows}) == len(rows)
