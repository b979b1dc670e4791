import click
from rich.console import Console

from commands.inputs import emit
from managers.report_manager import REPRODUCTION_COLUMNS, TABLE_IDS, ReportManager
from utils.errors import ReproductionFailure

console = Console(stderr=True)
ERROR_STYLE = "bold red"
SUCCESS_STYLE = "bold green"


@click.command()
@click.argument("table_ids", nargs=-1)
@click.option("--all", "run_all", is_flag=True, help="Reproduce every published table")
@click.option(
    "--profile",
    default="default",
    show_default=True,
    help="Tolerance profile: default, strict or a JSON file",
)
@click.pass_context
def reproduce(ctx: click.Context, table_ids, run_all: bool, profile: str) -> None:
    """Recompute published tables and compare every cell against its tolerance.

    Exits with status 3 when a match or loose-match cell misses its tolerance.
    """
    if run_all:
        table_ids = TABLE_IDS
    if not table_ids:
        raise click.UsageError(f"name a table or pass --all ({', '.join(TABLE_IDS)})", ctx)
    manager = ReportManager(profile)
    rows, failed = [], []
    for table_id in table_ids:
        report = manager.reproduce_table(table_id)
        rows.extend({"table_id": table_id, **row} for row in manager.report_rows(report))
        for note in report.notes:
            console.print(f"{table_id}: {note}")
        failed.extend(f"{table_id} {row.cell_id}" for row in report.failures)
    emit(ctx, rows, ("table_id",) + REPRODUCTION_COLUMNS, title="Reproduction")
    if failed:
        console.print(f"{len(failed)} cell(s) out of tolerance", style=ERROR_STYLE)
        raise ReproductionFailure(f"cells out of tolerance: {', '.join(failed)}")
    console.print("All checked cells within tolerance", style=SUCCESS_STYLE)
