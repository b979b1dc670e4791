"""Input resolution shared by the estlab commands.

Topic commands read the ``--input`` population when one is given and fall
back to their builtin dataset otherwise.
"""

from dataclasses import asdict
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import click

from datasets.builtin import DATASETS
from managers.moment_manager import MomentManager
from managers.population_manager import PopulationManager
from managers.report_manager import (
    aligarh_moments,
    backsolved_c20,
    load_population,
    murthy67_partials,
    murthy_systematic,
    pakrice_summary,
    published_stats,
)
from managers.systematic_manager import SystematicManager
from models.moment_model import MomentTable, PartialMomentTable
from models.population_model import AttributeSummary, FinitePopulation, SummaryStats
from models.report_model import EstimatorReport
from models.systematic_model import SystematicSummary
from utils.table import write_rows

REPORT_COLUMNS = ("estimator", "point", "bias1", "mse1", "bias2", "mse2", "pre", "note")


def parse_schema(ctx: click.Context, param: click.Parameter, value: Optional[str]):
    """Click callback turning ``y=COL,x=COL`` into a role mapping."""
    if not value:
        return None
    mapping = {}
    for item in value.split(","):
        role, sep, column = item.partition("=")
        if not sep or not role.strip() or not column.strip():
            raise click.BadParameter(f"expected role=column, got '{item}'", ctx, param)
        mapping[role.strip()] = column.strip()
    return mapping


def input_population(ctx: click.Context) -> Optional[FinitePopulation]:
    path = ctx.obj.get("input")
    if path is None:
        return None
    if "population" not in ctx.obj:
        ctx.obj["population"] = load_population(path, ctx.obj.get("schema"))
    return ctx.obj["population"]


def require_population(ctx: click.Context) -> FinitePopulation:
    population = input_population(ctx)
    if population is None:
        raise click.UsageError("this command needs --input PATH", ctx)
    return population


def emit(
    ctx: click.Context,
    rows: List[Dict[str, Any]],
    columns: Sequence[str],
    title: Optional[str] = None,
) -> None:
    write_rows(rows, columns, ctx.obj["format"], ctx.obj["out"], title)


def plain(value: Any) -> Any:
    return value.value if isinstance(value, Enum) else value


def record_rows(record: Any) -> List[Dict[str, Any]]:
    """``name``/``value`` rows of a dataclass, skipping absent fields."""
    return [
        {"name": name, "value": plain(value)}
        for name, value in asdict(record).items()
        if value is not None and not isinstance(value, (dict, tuple, list))
    ]


def estimator_rows(reports: Iterable[EstimatorReport]) -> List[Dict[str, Any]]:
    return [asdict(report) for report in reports]


def _sample_size(n: Optional[int], default: Optional[int], label: str) -> int:
    if n is not None:
        return n
    if default is None:
        raise click.UsageError(f"--n is required with --input ({label})")
    return default


def numeric_inputs(ctx: click.Context, dataset_id: str, n: Optional[int]) -> Tuple[SummaryStats, int]:
    population = input_population(ctx)
    if population is not None:
        stats = PopulationManager(ctx.obj["divisor"]).summarize_numeric(population)
        return stats, _sample_size(n, None, "dual")
    return published_stats(dataset_id), _sample_size(n, DATASETS[dataset_id].payload["n"], "dual")


def attribute_inputs(ctx: click.Context) -> AttributeSummary:
    population = input_population(ctx)
    if population is not None:
        return PopulationManager(ctx.obj["divisor"]).summarize_attributes(population)
    return pakrice_summary()


def family_inputs(
    ctx: click.Context, n: Optional[int], c20: Optional[float]
) -> Tuple[MomentTable, int, int, float]:
    """Moments, N, n and the population mean of y."""
    population = input_population(ctx)
    if population is not None:
        moments = MomentManager().moment_table(population)
        return moments, population.N, _sample_size(n, None, "family"), float(population.y.mean())
    p = DATASETS["ch3-aligarh"].payload
    moments = aligarh_moments(backsolved_c20() if c20 is None else c20)
    return moments, p["N"], _sample_size(n, p["n"], "family"), p["mean_y"]


def systematic_inputs(ctx: click.Context, n: Optional[int]) -> SystematicSummary:
    population = input_population(ctx)
    if population is None:
        return murthy_systematic()
    population.require("x")
    n = _sample_size(n, None, "systematic")
    stats = PopulationManager(ctx.obj["divisor"]).summarize_numeric(population)
    manager = SystematicManager()
    return SystematicSummary(
        N=population.N,
        n=n,
        mean_y=stats.mean_y,
        mean_x=stats.mean_x,
        s2_y=stats.var_y,
        s2_x=stats.var_x,
        rho=stats.rho_yx,
        rho_y=manager.intraclass_correlation(population.y, n),
        rho_x=manager.intraclass_correlation(population.x, n),
    )


def variance_inputs(
    ctx: click.Context, n: Optional[int], n_prime: Optional[int]
) -> Tuple[PartialMomentTable, int, Optional[int], float]:
    """Partial moments, n, n' and the scale S_y^2 (1 for published moments)."""
    population = input_population(ctx)
    if population is not None:
        partials = MomentManager().partial_table(population)
        s2_y = float(population.y.var(ddof=ctx.obj["divisor"].ddof))
        return partials, _sample_size(n, None, "variance"), n_prime, s2_y
    p = DATASETS["ch5-murthy67"].payload
    n_prime = p["n_prime"] if n_prime is None else n_prime
    return murthy67_partials(), _sample_size(n, p["n"], "variance"), n_prime, 1.0
