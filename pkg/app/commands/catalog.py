from __future__ import annotations

import logging

import click

from app.domain import expr as E
from app.domain.statuses import EntryStatus
from app.repositories.db_store import FlatFileDbStore
from app.textio.coverage import coverage_problems, load_coverage
from app.textio.parser import parse_spec
from app.textio.printer import print_expr

from .state import EXIT_VERIFY_FAILED, CliState, guarded, identity_line, parse_names, pass_state

logger = logging.getLogger(__name__)


@click.command("match")
@click.argument("spec_text", metavar="SPEC", required=False)
@click.option("--int", "integers", multiple=True, help="Symbols known to be integers.")
@click.option(
    "--status",
    "statuses",
    multiple=True,
    type=click.Choice([s.value for s in EntryStatus]),
    help="Entry statuses to search (default: closed and summable).",
)
@pass_state
@guarded
def match_command(state: CliState, spec_text: str | None, integers: tuple[str, ...], statuses: tuple[str, ...]) -> None:
    """Catalog entries whose left-hand side unifies with SPEC."""
    service = state.catalog_service()
    wanted = tuple(EntryStatus(s) for s in statuses) or (EntryStatus.CLOSED, EntryStatus.SUMMABLE)
    for text in state.inputs(spec_text):
        spec = parse_spec(text)
        known = parse_names(integers) or None
        results = service.match(spec, integers=known, statuses=wanted)
        if not results and not state.records:
            click.echo(f"{spec}: no match")
        for result in results:
            entry = state.catalog.get(result.entry_id)
            rhs = E.substitute(entry.rhs, result.unifier)
            if state.records:
                note = f"{entry.id} {entry.ref}".strip()
                click.echo(identity_line(entry.id, E.hyp(spec), rhs, note, known or ()))
                continue
            click.echo(str(result))
            click.echo(f"  = {print_expr(rhs)}")
            for condition in result.pending:
                click.echo(f"  pending: {condition}")


@click.command("verify")
@click.argument("entry_ids", nargs=-1)
@click.option("--all", "everything", is_flag=True, help="Every verifiable entry and relation.")
@click.option("--trials", type=int, default=None)
@click.option("--tolerance", default=None, help="Largest accepted relative residual.")
@click.option("--prec", "precision", type=int, default=None)
@pass_state
@guarded
def verify_command(
    state: CliState,
    entry_ids: tuple[str, ...],
    everything: bool,
    trials: int | None,
    tolerance: str | None,
    precision: int | None,
) -> None:
    """Sample entries at admissible bindings; exit 1 if any trial fails."""
    service = state.verify_service()
    seed = state.settings.seed
    if everything:
        reports = service.verify_all(trials, precision, tolerance, seed)
    else:
        ids = list(entry_ids) or list(state.inputs(None) if state.batch else [])
        if not ids:
            raise click.UsageError("Give entry ids, --all or --stdin")
        reports = [service.verify_entry(i, trials, precision, tolerance, seed) for i in ids]
    for report in sorted(reports, key=lambda r: r.entry_id):
        if state.records:
            verdict = "ok" if report.passed else "FAIL"
            note = f"{verdict} trials={report.trials} exact={report.exact_trials} max_residual={report.max_residual}"
            click.echo(identity_line(f"verify-{report.entry_id}", E.rat(len(report.failures)), E.ZERO, note))
        else:
            click.echo(report.as_record())
    failed = [r.entry_id for r in reports if not r.passed]
    logger.info("Verify run", extra={"records": len(reports), "failures": failed})
    if failed:
        raise SystemExit(EXIT_VERIFY_FAILED)


@click.command("coverage")
@pass_state
@guarded
def coverage_command(state: CliState) -> None:
    """Check that every label in the coverage manifest resolves; exit 1 otherwise."""
    rows = load_coverage(state.settings.coverage_path)
    known = set(state.catalog.by_id) | {entry.id for entry in FlatFileDbStore(state.settings.db_path).load()}
    problems = coverage_problems(rows, known)
    for problem in problems:
        click.echo(problem)
    external = sum(1 for row in rows if row.kind == "external")
    click.echo(f"{len(rows)} labels, {external} external, {len(problems)} problems")
    if problems:
        raise SystemExit(EXIT_VERIFY_FAILED)
