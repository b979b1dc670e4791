import logging

import click
from dotenv import load_dotenv

from commands.datasets_commands import datasets
from commands.inputs import parse_schema
from commands.oracle_commands import enumerate_cmd, simulate
from commands.optimize_commands import optimize
from commands.report_commands import report
from commands.reproduce_commands import reproduce
from commands.summarize_commands import summarize
from estlab import __version__
from models.population_model import Divisor
from utils.logger import set_level
from utils.table import FORMATS

load_dotenv()


@click.group()
@click.version_option(__version__, prog_name="estlab")
@click.option("--input", "input_path", type=click.Path(dir_okay=False), help="Population CSV")
@click.option("--schema", callback=parse_schema, help="Column mapping, e.g. y=hives,x=temp")
@click.option(
    "--divisor",
    type=click.Choice([divisor.value for divisor in Divisor]),
    default=Divisor.N_MINUS_1.value,
    show_default=True,
    help="Divisor of population mean squares",
)
@click.option(
    "--seed",
    type=click.IntRange(0, 2**64 - 1),
    default=0,
    envvar="ESTLAB_SEED",
    show_default=True,
    help="Monte-Carlo seed",
)
@click.option("--replicates", type=click.IntRange(min=2), default=10_000, show_default=True)
@click.option("--format", "output_format", type=click.Choice(FORMATS), default="text", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Write output here instead of stdout")
@click.option("--verbose", is_flag=True, help="Show execution details")
@click.pass_context
def cli(
    ctx: click.Context,
    input_path,
    schema,
    divisor: str,
    seed: int,
    replicates: int,
    output_format: str,
    out,
    verbose: bool,
) -> None:
    """Survey-sampling estimator laboratory."""
    ctx.ensure_object(dict)
    ctx.obj["input"] = input_path
    ctx.obj["schema"] = schema
    ctx.obj["divisor"] = Divisor(divisor)
    ctx.obj["seed"] = seed
    ctx.obj["replicates"] = replicates
    ctx.obj["format"] = output_format
    ctx.obj["out"] = out
    ctx.obj["verbose"] = verbose
    if verbose:
        set_level(logging.DEBUG)


cli.add_command(summarize)
cli.add_command(report)
cli.add_command(optimize)
cli.add_command(reproduce)
cli.add_command(enumerate_cmd)
cli.add_command(simulate)
cli.add_command(datasets)

if __name__ == "__main__":
    cli.main()
