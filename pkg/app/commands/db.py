from __future__ import annotations

import click

from app.domain import expr as E
from app.textio.parser import parse_expr, parse_spec
from app.textio.records import format_record, parse_identity_record

from .state import CliState, guarded, identity_line, parse_names, pass_state


@click.group("db")
def db_group() -> None:
    """Evaluation database keyed by orbit representatives."""


@db_group.command("lookup")
@click.argument("spec_text", metavar="SPEC", required=False)
@click.option("--int", "integers", multiple=True)
@pass_state
@guarded
def lookup_command(state: CliState, spec_text: str | None, integers: tuple[str, ...]) -> None:
    """Stored records whose key lies in the orbit of SPEC."""
    service = state.db_service()
    for text in state.inputs(spec_text):
        spec = parse_spec(text)
        hits = service.lookup(spec, parse_names(integers) or None)
        if not hits and not state.records:
            click.echo(f"{spec}: not in database")
        for record in hits:
            entry = record.entry
            if state.records:
                click.echo(format_record(entry))
            else:
                click.echo(f"{entry.id}: {entry.lhs} = {entry.rhs}  [{record.provenance}; {entry.status.display_name}]")


@db_group.command("add")
@click.argument("record_text", metavar="RECORD", required=False)
@pass_state
@guarded
def add_command(state: CliState, record_text: str | None) -> None:
    """Append a record unless an orbit-equivalent one with the same constraints exists."""
    service = state.db_service()
    for text in state.inputs(record_text):
        entry = parse_identity_record(text, section="database")
        record = service.add(entry)
        if state.records:
            click.echo(format_record(entry))
        else:
            click.echo(f"added {entry.id} key={record.key}")


@db_group.command("scan")
@click.option("--relation", "relation_ids", multiple=True, help="Relation ids to apply (default: all).")
@click.option("--entry", "entry_ids", multiple=True, help="Restrict the anchoring records.")
@pass_state
@guarded
def scan_command(state: CliState, relation_ids: tuple[str, ...], entry_ids: tuple[str, ...]) -> None:
    """Relation instances with every term known but one; printed, never stored."""
    contiguity = state.contiguity_service()
    relations = (
        [contiguity.get_relation(r) for r in relation_ids] if relation_ids else contiguity.relations()
    )
    candidates = state.db_service().scan_for_new(relations, parse_names(entry_ids) or None)
    for index, candidate in enumerate(candidates):
        if state.records:
            note = f"scan {candidate.relation} from {' '.join(candidate.known)}"
            lhs = E.hyp(parse_spec(candidate.unresolved))
            click.echo(identity_line(f"scan{index}", lhs, parse_expr(candidate.expression), note))
        else:
            click.echo(f"[{candidate.relation}] {candidate.unresolved} = {candidate.expression}")
            click.echo(f"  known: {', '.join(candidate.known)}")
    if not candidates and not state.records:
        click.echo("no candidates")
