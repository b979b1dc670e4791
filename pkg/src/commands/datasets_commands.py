import click

from commands.inputs import emit
from datasets.builtin import DATASETS, builtin_dataset

DATASET_COLUMNS = ("constant", "value", "citation", "note", "calibrated")


@click.group()
@click.pass_context
def datasets(ctx: click.Context):
    """Builtin datasets with their citations."""
    ctx.ensure_object(dict)


@datasets.command(name="list")
@click.pass_context
def list_datasets(ctx: click.Context) -> None:
    """List the builtin datasets."""
    rows = [
        {
            "id": descriptor.id,
            "description": descriptor.description,
            "calibrated": ", ".join(descriptor.calibrated),
        }
        for descriptor in DATASETS.values()
    ]
    emit(ctx, rows, ("id", "description", "calibrated"), title="Builtin datasets")


@datasets.command()
@click.argument("dataset_id")
@click.pass_context
def show(ctx: click.Context, dataset_id: str) -> None:
    """Dump every constant of a dataset with its citation and notes."""
    descriptor = builtin_dataset(dataset_id)
    emit(ctx, descriptor.rows(), DATASET_COLUMNS, title=descriptor.description)
