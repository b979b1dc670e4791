from dataclasses import asdict

import click

from commands.inputs import (
    attribute_inputs,
    emit,
    family_inputs,
    numeric_inputs,
    plain,
    record_rows,
    systematic_inputs,
    variance_inputs,
)
from datasets.builtin import DATASETS
from managers.attribute_manager import AttributeManager
from managers.dual_ratio_product_manager import DualRatioProductManager
from managers.mean_family_manager import MeanFamilyManager
from managers.population_manager import design_coefficients
from managers.systematic_manager import SystematicManager
from managers.variance_manager import VarianceManager
from models.attribute_model import OptimaMode
from models.mean_family_model import ExpansionMode, MeanEstimator
from models.systematic_model import NonResponseSpec
from models.variance_model import VarianceOptimaMode

FAMILY_COLUMNS = ("estimator", "parameter", "value", "mse1", "grid_mse1")


@click.group()
@click.pass_context
def optimize(ctx: click.Context):
    """Optimal constants of each estimator family and the MSE they attain."""
    ctx.ensure_object(dict)


@optimize.command()
@click.option("--n", type=click.IntRange(min=2))
@click.option("--c20", type=float, help="C_20 for the builtin moments; back-solved when omitted")
@click.pass_context
def family(ctx: click.Context, n, c20) -> None:
    """Tuning parameter minimizing each member's first-order MSE."""
    moments, N, n, mean_y = family_inputs(ctx, n, c20)
    coeffs = design_coefficients(N, n)
    manager = MeanFamilyManager(ExpansionMode.AS_PRINTED)
    rows = []
    for estimator in MeanEstimator:
        optimum = asdict(manager.family_optimum(moments, coeffs, estimator, mean_y))
        rows.append({key: plain(value) for key, value in optimum.items()})
    emit(ctx, rows, FAMILY_COLUMNS, title="First-order optima")


@optimize.command()
@click.option(
    "--dataset",
    type=click.Choice(["ch4-pop1", "ch4-pop2"]),
    default="ch4-pop2",
    show_default=True,
)
@click.option("--n", type=click.IntRange(min=2))
@click.pass_context
def dual(ctx: click.Context, dataset: str, n) -> None:
    """theta0 and the minimum MSE of the dual ratio-cum-product estimator."""
    stats, n = numeric_inputs(ctx, dataset, n)
    summary = DualRatioProductManager().pr_optimum(stats, design_coefficients(stats.N, n))
    emit(ctx, record_rows(summary), ("name", "value"), title="Dual ratio-cum-product optimum")


@optimize.command()
@click.option("--n", type=click.IntRange(min=2), help="Sample size")
@click.option(
    "--mode",
    type=click.Choice([mode.value for mode in OptimaMode]),
    default=OptimaMode.AS_PRINTED.value,
    show_default=True,
)
@click.option("--target-pre", type=float, help="Report the n whose PRE lies closest to this value")
@click.option("--estimator", default="t6", show_default=True, help="Estimator for --target-pre")
@click.pass_context
def attributes(ctx: click.Context, n, mode: str, target_pre, estimator: str) -> None:
    """Optimal w1, (K61, K62) and (K71, K72)."""
    summary = attribute_inputs(ctx)
    manager = AttributeManager()
    if target_pre is not None:
        fit = manager.best_fit_sample_size(summary, target_pre, estimator, OptimaMode(mode))
        rows = record_rows(fit) + [{"name": "rel_residual", "value": fit.rel_residual}]
        emit(ctx, rows, ("name", "value"), title="Best-fit sample size")
        return
    if n is None:
        raise click.UsageError("--n or --target-pre is required", ctx)
    optima = manager.attr_optima(summary, 1.0 / n - 1.0 / summary.N, OptimaMode(mode))
    rows = record_rows(optima.params)
    rows += [{"name": f"mse.{key}", "value": value} for key, value in optima.mse.items()]
    rows += [{"name": f"grid_mse.{key}", "value": value} for key, value in optima.grid_mse.items()]
    emit(ctx, rows, ("name", "value"), title=f"Attribute optima ({mode})")


@optimize.command()
@click.option("--n", type=click.IntRange(min=2), help="Sample size; required with --input")
@click.option("--w2", type=click.FloatRange(0.0, 1.0), default=0.0, show_default=True)
@click.option("--bigL", "big_l", type=click.FloatRange(min=1.0, min_open=True), default=2.0, show_default=True)
@click.option("--s2-y2", type=click.FloatRange(min=0.0))
@click.pass_context
def systematic(ctx: click.Context, n, w2: float, big_l: float, s2_y2) -> None:
    """Roots of phi(alpha) = rho* K and the optimum factor-type estimator."""
    summary = systematic_inputs(ctx, n)
    if s2_y2 is None:
        s2_y2 = summary.s2_y if ctx.obj.get("input") else DATASETS["ch1-murthy"].payload["s2_y2"]
    optimum = SystematicManager().alpha_optimum(summary, NonResponseSpec(w2, big_l, s2_y2))
    rows = record_rows(optimum)
    rows += [{"name": f"root{index}", "value": root} for index, root in enumerate(optimum.roots, 1)]
    rows += [
        {"name": f"cubic_root{index}", "value": str(root)}
        for index, root in enumerate(optimum.all_roots, 1)
    ]
    emit(ctx, rows, ("name", "value"), title="Optimum alpha")


@optimize.command()
@click.option("--n", type=click.IntRange(min=2))
@click.option("--n-prime", type=click.IntRange(min=3))
@click.option(
    "--mode",
    type=click.Choice([mode.value for mode in VarianceOptimaMode]),
    default=VarianceOptimaMode.GRID.value,
    show_default=True,
)
@click.option("--p", type=float, default=1.0, show_default=True)
@click.option("--q", type=float, default=1.0, show_default=True)
@click.pass_context
def variance(ctx: click.Context, n, n_prime, mode: str, p: float, q: float) -> None:
    """Optimal x1, x2 and mixing constants of the variance estimators."""
    partials, n, n_prime, _ = variance_inputs(ctx, n, n_prime)
    optima = VarianceManager().var_optima(partials, n, n_prime, VarianceOptimaMode(mode), p, q)
    emit(ctx, record_rows(optima), ("name", "value"), title=f"Variance optima ({mode})")
