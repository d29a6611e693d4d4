from __future__ import annotations

import click

from app.domain import expr as E
from app.domain.enums import RuleFamily
from app.domain.errors import RuleNotApplicableError
from app.rules import get_rule, guess_integer_symbols
from app.textio.parser import parse_spec
from app.textio.printer import print_expr

from .state import EXIT_VERIFY_FAILED, CliState, guarded, identity_line, parse_names, pass_state


def _families(text: str) -> frozenset[RuleFamily]:
    try:
        return RuleFamily.parse_many(text)
    except ValueError as exc:
        raise click.BadParameter(f"Unknown rule family in {text!r}") from exc


@click.command("transform")
@click.argument("rule_id", metavar="RULE")
@click.argument("spec_text", metavar="SPEC", required=False)
@click.option("--int", "integers", multiple=True, help="Symbols known to be integers.")
@pass_state
@guarded
def transform_command(state: CliState, rule_id: str, spec_text: str | None, integers: tuple[str, ...]) -> None:
    """Apply one rule (thom1..thom9, ra1p..raB, reverse) to a 3F2."""
    rule = get_rule(rule_id)
    for text in state.inputs(spec_text):
        spec = parse_spec(text)
        known = parse_names(integers) or guess_integer_symbols(spec)
        for top_order, bottom_order in spec.slot_orders():
            ordered = spec.reorder(top_order, bottom_order)
            if rule.applies(ordered, known):
                prefactor, image = rule.apply(ordered, known)
                break
        else:
            raise RuleNotApplicableError(f"{rule.id} does not apply to {spec}")
        rhs = E.mul(prefactor, E.hyp(image))
        if state.records:
            click.echo(identity_line(rule.id, E.hyp(spec), rhs, f"rule {rule.id}", known))
        else:
            click.echo(print_expr(rhs))


@click.command("orbit")
@click.argument("spec_text", metavar="SPEC", required=False)
@click.option("--rules", "rules", default="thomae", show_default=True, help="Comma list of rule families.")
@click.option("--depth", type=int, default=None, help="Search depth limit.")
@click.option("--int", "integers", multiple=True)
@pass_state
@guarded
def orbit_command(state: CliState, spec_text: str | None, rules: str, depth: int | None, integers: tuple[str, ...]) -> None:
    """List the closure of a 3F2 under the chosen transformations."""
    service = state.orbit_service()
    families = _families(rules)
    for text in state.inputs(spec_text):
        spec = parse_spec(text)
        known = parse_names(integers) or None
        orbit = service.orbit_closure(spec, families, depth, known)
        members = sorted(orbit.members.values(), key=lambda s: s.key)
        if state.records:
            for index, member in enumerate(members):
                prefactor = E.ONE
                for step in service.chain_to(orbit, member):
                    prefactor = E.mul(prefactor, step.prefactor)
                line = identity_line(
                    f"orbit{index}", E.hyp(spec), E.mul(prefactor, E.hyp(member)), "orbit member", orbit.integers
                )
                click.echo(line)
            continue
        status = "complete" if orbit.complete else f"incomplete after depth {orbit.depth}"
        click.echo(f"orbit of {spec}: size={orbit.size} ({status})")
        for member in members:
            click.echo(f"  {member}")


@click.command("related")
@click.argument("first")
@click.argument("second")
@click.option("--rules", "rules", default="thomae", show_default=True)
@click.option("--depth", type=int, default=None)
@click.option("--int", "integers", multiple=True)
@click.option("--verify", "check", is_flag=True, help="Sample the witness chain numerically.")
@pass_state
@guarded
def related_command(
    state: CliState,
    first: str,
    second: str,
    rules: str,
    depth: int | None,
    integers: tuple[str, ...],
    check: bool,
) -> None:
    """Decide whether two 3F2 are connected by the chosen transformations."""
    x, y = parse_spec(first), parse_spec(second)
    known = parse_names(integers) or (guess_integer_symbols(x) | guess_integer_symbols(y))
    verdict = state.orbit_service().related(x, y, _families(rules), depth, known)
    if not verdict.related:
        click.echo("# not related" if state.records else f"not related (orbit size {verdict.orbit_size})")
        return
    if state.records:
        click.echo(identity_line("related", E.hyp(x), E.mul(verdict.prefactor, E.hyp(y)), "witness chain", known))
    else:
        click.echo(f"related in {len(verdict.chain)} step(s)")
        for step in verdict.chain:
            click.echo(f"  {step}")
        click.echo(f"  prefactor: {print_expr(verdict.prefactor)}")
    if check:
        report = state.verify_service().verify_chain(x, verdict, known)
        click.echo(("# " if state.records else "") + report.as_record())
        if not report.passed:
            raise SystemExit(EXIT_VERIFY_FAILED)
