from __future__ import annotations

import click

from app.commands import catalog, db, evaluate, transforms
from app.commands.state import CliState
from app.config import settings
from app.domain.enums import OutputFormat
from app.logging import setup_logging


@click.group()
@click.option("--prec", "precision", type=click.IntRange(min=20), default=None, help="Decimal digits.")
@click.option("--seed", type=int, default=None, help="Sampler seed.")
@click.option("--db", "db_path", type=click.Path(dir_okay=False), default=None, help="Database file.")
@click.option(
    "--format",
    "output",
    type=click.Choice([f.value for f in OutputFormat]),
    default=OutputFormat.TEXT.value,
    show_default=True,
)
@click.option("--stdin", "batch", is_flag=True, help="Read one input per line from stdin.")
@click.option("--log-level", default="WARNING", show_default=True)
@click.pass_context
def cli(
    ctx: click.Context,
    precision: int | None,
    seed: int | None,
    db_path: str | None,
    output: str,
    batch: bool,
    log_level: str,
) -> None:
    """Symbolic-numeric toolkit for 3F2 series at unit argument."""
    setup_logging(log_level)
    overrides: dict[str, object] = {}
    if precision is not None:
        overrides["precision"] = precision
    if seed is not None:
        overrides["seed"] = seed
    if db_path is not None:
        overrides["db_path"] = db_path
    ctx.obj = CliState(settings.model_copy(update=overrides), OutputFormat(output), batch)


cli.add_command(evaluate.eval_command)
cli.add_command(evaluate.classify_command)
cli.add_command(evaluate.psi_command)
cli.add_command(transforms.transform_command)
cli.add_command(transforms.orbit_command)
cli.add_command(transforms.related_command)
cli.add_command(catalog.match_command)
cli.add_command(catalog.verify_command)
cli.add_command(catalog.coverage_command)
cli.add_command(db.db_group)


if __name__ == "__main__":
    cli()
