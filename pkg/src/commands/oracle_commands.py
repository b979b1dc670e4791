from dataclasses import asdict
from typing import Dict, List, Optional, Tuple

import click

from commands.inputs import emit, input_population
from datasets.builtin import POP2_CSV
from managers.oracle_manager import (
    STANDARD_ESTIMATORS,
    EstimatorFn,
    OracleManager,
    factor_type_estimator,
    standard_estimator,
)
from managers.report_manager import load_population
from models.oracle_model import (
    DEFAULT_ENUMERATION_CAP,
    DesignKind,
    DesignSpec,
    NonResponseDesign,
)
from models.population_model import FinitePopulation
from utils.logger import configure_logger

logger = configure_logger(__name__)

RESULT_COLUMNS = (
    "estimator_id",
    "mean",
    "bias",
    "mse",
    "mc_std_error",
    "mse_std_error",
    "count",
    "exact",
    "target",
)
IDENTITY_COLUMNS = ("identity", "analytic", "enumerated", "rel_diff")


def parse_allocation(ctx: click.Context, param: click.Parameter, value: Optional[str]):
    """Click callback turning ``A=2,B=3`` into per-stratum sample sizes."""
    if not value:
        return None
    allocation: Dict[str, int] = {}
    for item in value.split(","):
        label, _, size = item.partition("=")
        if not size.strip().isdigit():
            raise click.BadParameter(f"expected label=size, got '{item}'", ctx, param)
        allocation[label.strip()] = int(size)
    return allocation


def design_options(command):
    """Design and estimator options shared by enumerate and simulate."""
    options = [
        click.option(
            "--design",
            type=click.Choice([kind.value for kind in DesignKind]),
            default=DesignKind.SRSWOR.value,
            show_default=True,
        ),
        click.option("--n", type=click.IntRange(min=1), required=True, help="Sample size"),
        click.option("--n-prime", type=click.IntRange(min=2), help="First-phase size (two-phase)"),
        click.option("--k", type=click.IntRange(min=1), help="Systematic interval; N/n when omitted"),
        click.option("--bigL", "big_l", type=float, help="Follow up 1/L of the non-respondents"),
        click.option("--allocation", callback=parse_allocation, help="Stratum sizes, e.g. A=2,B=3"),
        click.option(
            "--estimator",
            "estimators",
            type=click.Choice(sorted(STANDARD_ESTIMATORS)),
            multiple=True,
            help="Repeatable; mean when neither --estimator nor --alpha is given",
        ),
        click.option(
            "--alpha",
            "alphas",
            type=click.FloatRange(min=0.0, min_open=True),
            multiple=True,
            help="Factor-type estimator T(alpha) on the follow-up mean; repeatable",
        ),
        click.option("--target", type=float, help="Target value; the population mean (or S_y^2)"),
        click.option(
            "--cap", type=click.IntRange(min=1), default=DEFAULT_ENUMERATION_CAP, show_default=True
        ),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def oracle_population(ctx: click.Context) -> FinitePopulation:
    """The --input population, or Population II of the dual estimator data."""
    population = input_population(ctx)
    return population if population is not None else load_population(POP2_CSV)


def _spec(ctx, design, n, n_prime, k, big_l, allocation, cap) -> DesignSpec:
    return DesignSpec(
        kind=DesignKind(design),
        n=n,
        k=k,
        n_prime=n_prime,
        nonresponse=NonResponseDesign(big_l) if big_l is not None else None,
        allocation=allocation,
        seed=ctx.obj["seed"],
        replicates=ctx.obj["replicates"],
        enumeration_cap=cap,
    )


def _estimators(estimators, alphas) -> List[Tuple[str, EstimatorFn]]:
    chosen = [(estimator_id, standard_estimator(estimator_id)) for estimator_id in estimators]
    chosen += [(f"T(alpha={alpha:g})", factor_type_estimator(alpha)) for alpha in alphas]
    return chosen or [("mean", standard_estimator("mean"))]


def _target(population: FinitePopulation, estimator_id: str, target: Optional[float]) -> Optional[float]:
    if target is None and estimator_id == "sample-variance":
        return float(population.y.var(ddof=1))
    return target


@click.command(name="enumerate")
@design_options
@click.option("--identities", is_flag=True, help="Check the SRSWOR moment identities instead")
@click.pass_context
def enumerate_cmd(
    ctx: click.Context, design, n, n_prime, k, big_l, allocation, estimators, alphas, target, cap, identities
) -> None:
    """Exact bias and MSE over every sample the design can draw."""
    population = oracle_population(ctx)
    manager = OracleManager()
    if identities:
        checks = manager.verify_moment_identities(population, n, cap)
        emit(ctx, [asdict(check) for check in checks], IDENTITY_COLUMNS, title="Moment identities")
        return
    spec = _spec(ctx, design, n, n_prime, k, big_l, allocation, cap)
    rows = []
    for estimator_id, estimator in _estimators(estimators, alphas):
        result = manager.enumerate_design(
            population,
            spec,
            estimator,
            estimator_id,
            _target(population, estimator_id, target),
        )
        rows.append(asdict(result))
    emit(ctx, rows, RESULT_COLUMNS, title=f"Enumeration ({design}, n={n})")


@click.command()
@design_options
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@click.pass_context
def simulate(
    ctx: click.Context, design, n, n_prime, k, big_l, allocation, estimators, alphas, target, cap, workers: int
) -> None:
    """Monte-Carlo bias and MSE with --seed and --replicates."""
    population = oracle_population(ctx)
    manager = OracleManager(workers=workers)
    spec = _spec(ctx, design, n, n_prime, k, big_l, allocation, cap)
    rows = []
    for estimator_id, estimator in _estimators(estimators, alphas):
        result = manager.monte_carlo(
            population,
            spec,
            estimator,
            estimator_id,
            _target(population, estimator_id, target),
        )
        rows.append(asdict(result))
    logger.debug("simulated %d estimators with seed %d", len(rows), spec.seed)
    emit(ctx, rows, RESULT_COLUMNS, title=f"Monte Carlo ({design}, n={n}, R={spec.replicates})")
