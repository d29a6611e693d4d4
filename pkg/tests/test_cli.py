from __future__ import annotations

import pathlib
import sys

import pytest
from click.testing import CliRunner, Result

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from app.main import cli
from app.textio.records import parse_identity_record


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def run(runner: CliRunner, *args: str, stdin: str | None = None) -> Result:
    return runner.invoke(cli, list(args), input=stdin)


def lines(result: Result) -> list[str]:
    """Output lines without the JSON log lines."""
    return [line for line in result.output.splitlines() if line and not line.startswith("{")]


def test_eval_exact(runner: CliRunner) -> None:
    result = run(runner, "eval", "Gamma(5)")
    assert result.exit_code == 0
    assert lines(result) == ["24"]


def test_eval_with_binding(runner: CliRunner) -> None:
    result = run(runner, "eval", "poch(a,3)", "--bind", "a=1/2")
    assert result.exit_code == 0
    assert lines(result) == ["15/8"]


def test_eval_records_parse_back(runner: CliRunner) -> None:
    result = run(runner, "--format", "records", "eval", "Gamma(7/2)/Gamma(3/2)")
    assert result.exit_code == 0
    entry = parse_identity_record(lines(result)[0])
    assert str(entry.rhs) == "15/4"


def test_eval_from_stdin(runner: CliRunner) -> None:
    result = run(runner, "--stdin", "eval", stdin="Gamma(4)\n# comment\nbinom(5,2)\n")
    assert result.exit_code == 0
    assert lines(result) == ["6", "10"]


def test_parse_error_is_usage(runner: CliRunner) -> None:
    result = run(runner, "eval", "Gamma(")
    assert result.exit_code == 2
    assert "error:" in result.output


def test_classify_symbolic(runner: CliRunner) -> None:
    result = run(runner, "classify", "3F2(-n,a,b;c,e)")
    assert result.exit_code == 0
    assert "terminating(length=n+1)" in result.output


def test_psi(runner: CliRunner) -> None:
    result = run(runner, "psi", "1/4")
    assert result.exit_code == 0
    assert "euler" in result.output
    assert "psi" not in lines(result)[0]


def test_transform(runner: CliRunner) -> None:
    result = run(runner, "transform", "thom3", "3F2(a,b,c;e,f)")
    assert result.exit_code == 0
    assert "3F2(" in result.output


def test_transform_unknown_rule(runner: CliRunner) -> None:
    assert run(runner, "transform", "thom42", "3F2(a,b,c;e,f)").exit_code == 2


def test_orbit(runner: CliRunner) -> None:
    result = run(runner, "orbit", "3F2(a,b,c;e,f)")
    assert result.exit_code == 0
    assert "size=10 (complete)" in result.output


def test_related(runner: CliRunner) -> None:
    result = run(runner, "related", "3F2(a,b,c;e,f)", "3F2(a,f-b,f-c;f,e+f-b-c)")
    assert result.exit_code == 0
    assert "related in 1 step(s)" in result.output
    unrelated = run(runner, "related", "3F2(a,b,c;e,f)", "3F2(a,b,c;e,f+1)")
    assert "not related" in unrelated.output


def test_match(runner: CliRunner) -> None:
    result = run(runner, "match", "2F1(-n,x;y)", "--int", "n")
    assert result.exit_code == 0
    assert "chuvandermonde" in result.output


def test_verify_ok(runner: CliRunner) -> None:
    result = run(runner, "verify", "saalschuetz", "--trials", "2")
    assert result.exit_code == 0
    assert any(line.startswith("saalschuetz | ok") for line in lines(result))


def test_verify_external_is_evaluation_error(runner: CliRunner) -> None:
    assert run(runner, "verify", "cwt2").exit_code == 3


def test_verify_unknown_entry_is_usage(runner: CliRunner) -> None:
    assert run(runner, "verify", "no-such-entry").exit_code == 2


def test_coverage(runner: CliRunner) -> None:
    result = run(runner, "coverage")
    assert result.exit_code == 0
    assert lines(result)[-1].endswith("0 problems")


def test_db_add_and_lookup(runner: CliRunner, tmp_path: pathlib.Path) -> None:
    db = str(tmp_path / "db.txt")
    record = "gx | a:real,b:real,c:real,e:real,f:real | - | 3F2(a,b,c;e,f) | 1 | placeholder"
    added = run(runner, "--db", db, "db", "add", record)
    assert added.exit_code == 0
    assert "added gx" in added.output
    again = run(runner, "--db", db, "db", "add", record)
    assert again.exit_code == 2
    found = run(runner, "--db", db, "db", "lookup", "3F2(a,f-b,f-c;f,e+f-b-c)")
    assert found.exit_code == 0
    assert "gx:" in found.output
