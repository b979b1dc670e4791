import click

from commands.inputs import emit, record_rows, require_population
from managers.moment_manager import MomentManager
from managers.population_manager import PopulationManager
from utils.logger import configure_logger

logger = configure_logger(__name__)


@click.command()
@click.option("--moments", is_flag=True, help="Also list C_pq and, with z, d_pqr")
@click.pass_context
def summarize(ctx: click.Context, moments: bool) -> None:
    """Means, mean squares, correlations and moments of the --input population."""
    population = require_population(ctx)
    manager = PopulationManager(ctx.obj["divisor"])
    rows = record_rows(manager.summarize_numeric(population))
    if population.has("phi1") and population.has("phi2"):
        attributes = manager.summarize_attributes(population)
        rows.extend(
            {"name": f"attributes.{row['name']}", "value": row["value"]}
            for row in record_rows(attributes)
        )
    if moments:
        moment_manager = MomentManager()
        table = moment_manager.moment_table(population)
        rows.extend(
            {"name": f"C{p}{q}", "value": value}
            for (p, q), value in sorted(table.entries.items())
            if p + q >= 2
        )
        if population.has("z"):
            partials = moment_manager.partial_table(population)
            rows.extend(
                {"name": f"d{p}{q}{r}", "value": value}
                for (p, q, r), value in sorted(partials.entries.items())
            )
    logger.debug("summary of %d units", population.N)
    emit(ctx, rows, ("name", "value"), title="Population summary")
