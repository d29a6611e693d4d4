from __future__ import annotations

import logging
import re
from fractions import Fraction

import click
import mpmath

from app.domain import expr as E
from app.domain.linform import LinForm
from app.numerics.hypseries import classify
from app.numerics.numeval import EvalContext, eval_exact, eval_expr
from app.numerics.psi_rational import reduce_psi
from app.rules import guess_integer_symbols, termination_length
from app.textio.parser import parse_expr, parse_spec
from app.textio.printer import print_expr, print_number

from .state import CliState, guarded, identity_line, parse_binding, parse_names, pass_state

logger = logging.getLogger(__name__)

_BARE_PSI = re.compile(r"\bpsi\s+([0-9]+(?:/[0-9]+)?)")
_LEADING_RATIONAL = re.compile(r"^\s*([0-9]+/[0-9]+|[0-9]+)(?=\s|$)")


def _as_fraction(value: object, digits: int) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(mpmath.nstr(mpmath.re(value), digits))


@click.command("eval")
@click.argument("expression", required=False)
@click.option("--bind", "bindings", multiple=True, help="name=value pairs, comma separated.")
@click.option("--prec", "precision", type=int, default=None, help="Decimal digits for this call.")
@pass_state
@guarded
def eval_command(state: CliState, expression: str | None, bindings: tuple[str, ...], precision: int | None) -> None:
    """Evaluate an expression at a rational binding."""
    binding = parse_binding(bindings)
    digits = precision or state.settings.precision
    constants = {name: LinForm.const(value) for name, value in binding.items()}
    for text in state.inputs(expression):
        tree = parse_expr(text)
        exact = eval_exact(tree, binding)
        value = exact if exact is not None else eval_expr(tree, EvalContext(binding, digits))
        logger.debug("Evaluated", extra={"verb": "eval", "precision": digits})
        if state.records:
            closed = E.substitute(tree, constants)
            click.echo(identity_line("eval", closed, E.rat(_as_fraction(value, digits)), f"prec={digits}"))
        else:
            click.echo(print_number(value, digits))


@click.command("classify")
@click.argument("spec_text", metavar="SPEC", required=False)
@click.option("--bind", "bindings", multiple=True)
@click.option("--int", "integers", multiple=True, help="Symbols known to be integers.")
@pass_state
@guarded
def classify_command(state: CliState, spec_text: str | None, bindings: tuple[str, ...], integers: tuple[str, ...]) -> None:
    """Classify a series as terminating, convergent, divergent or degenerate."""
    binding = parse_binding(bindings)
    for text in state.inputs(spec_text):
        spec = parse_spec(text)
        if spec.symbols <= set(binding):
            info = classify(spec, binding)
            summary = str(info)
            excess = E.rat(info.excess)
        else:
            known = parse_names(integers) or guess_integer_symbols(spec)
            lengths = [termination_length(top, known) for top in spec.tops]
            ends = [str(length + 1) for length in lengths if length is not None]
            kind = f"terminating(length={ends[0]})" if ends else "symbolic"
            summary = f"{kind} sigma={spec.excess}"
            excess = E.lin(spec.excess)
        if state.records:
            click.echo(identity_line("classify", E.hyp(spec), excess, summary))
        else:
            click.echo(f"{spec}: {summary}")


def _psi_text(words: tuple[str, ...]) -> str:
    text = " ".join(words)
    text = _LEADING_RATIONAL.sub(lambda m: f"psi({m.group(1)})", text)
    return _BARE_PSI.sub(lambda m: f"psi({m.group(1)})", text)


@click.command("psi")
@click.argument("words", nargs=-1)
@pass_state
@guarded
def psi_command(state: CliState, words: tuple[str, ...]) -> None:
    """Closed form of psi values at rationals, e.g. `psi 5/8 - psi 1/8`."""
    sources = state.inputs(None) if state.batch else [_psi_text(words)]
    for text in sources:
        tree = parse_expr(_psi_text((text,)))
        reduced = reduce_psi(tree)
        if state.records:
            click.echo(identity_line("psi", tree, reduced, "psi reduction"))
        else:
            click.echo(print_expr(reduced))
