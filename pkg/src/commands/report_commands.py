from dataclasses import asdict, replace

import click
from rich.console import Console

from commands.inputs import (
    REPORT_COLUMNS,
    attribute_inputs,
    emit,
    estimator_rows,
    family_inputs,
    numeric_inputs,
    systematic_inputs,
    variance_inputs,
)
from datasets.builtin import DATASETS, PUBLISHED_TABLES
from managers.attribute_manager import AttributeManager
from managers.dual_ratio_product_manager import CLASSICAL_ESTIMATORS, DualRatioProductManager
from managers.mean_family_manager import MeanFamilyManager
from managers.population_manager import design_coefficients
from managers.systematic_manager import SystematicManager
from managers.variance_manager import VarianceManager
from models.attribute_model import FormulaVariant, OptimaMode
from models.dual_model import DualPRParams, SampleMeans
from models.mean_family_model import TUNING_PARAMETER, ExpansionMode, MeanEstimator, MeanFamilyParams
from models.systematic_model import NonResponseSpec
from models.variance_model import ProductSign, VarianceOptimaMode
from utils.logger import configure_logger

console = Console(stderr=True)
WARNING_STYLE = "bold yellow"

logger = configure_logger(__name__)

CONDITION_COLUMNS = (
    "name",
    "competitor",
    "holds",
    "mse_difference",
    "printed_holds",
    "lhs",
    "rhs",
    "proviso_holds",
)
_NEEDS_X = {"R", "S", "R*", "SE", "ST"}
_NEEDS_Z = {"P", "S", "P*", "SE"}


@click.group()
@click.pass_context
def report(ctx: click.Context):
    """Bias, MSE and PRE of one estimator family."""
    ctx.ensure_object(dict)


@report.command()
@click.option(
    "--dataset",
    type=click.Choice(["ch4-pop1", "ch4-pop2"]),
    default="ch4-pop2",
    show_default=True,
    help="Builtin summary used without --input",
)
@click.option("--n", type=click.IntRange(min=2), help="Sample size")
@click.option("--theta", type=float, help="Mixing weight; the optimum when omitted")
@click.option("--ybar", type=float, help="Sample mean of y, for point estimates")
@click.option("--xbar", type=float)
@click.option("--zbar", type=float)
@click.option("--conditions", is_flag=True, help="List the efficiency conditions instead")
@click.pass_context
def dual(ctx: click.Context, dataset, n, theta, ybar, xbar, zbar, conditions: bool) -> None:
    """Ratio, product and dual comparators against the dual ratio-cum-product estimator."""
    stats, n = numeric_inputs(ctx, dataset, n)
    coeffs = design_coefficients(stats.N, n)
    manager = DualRatioProductManager()
    has_pr = stats.mean_x is not None and stats.mean_z is not None
    if theta is None and has_pr:
        theta = manager.pr_optimum(stats, coeffs).theta0
    if conditions:
        if not has_pr:
            raise click.UsageError("efficiency conditions need both x and z", ctx)
        rows = [asdict(condition) for condition in manager.efficiency_conditions(stats, coeffs, theta)]
        emit(ctx, rows, CONDITION_COLUMNS, title=f"Efficiency conditions at theta={theta:.6g}")
        return
    sample = SampleMeans(ybar, xbar, zbar) if ybar is not None else None
    estimators = [
        estimator
        for estimator in CLASSICAL_ESTIMATORS
        if (stats.mean_x is not None or estimator not in _NEEDS_X)
        and (stats.mean_z is not None or estimator not in _NEEDS_Z)
    ]
    reports = manager.classical_report(stats, coeffs, sample, estimators)
    if has_pr:
        reports.append(manager.pr_report(stats, coeffs, DualPRParams(theta), sample))
    emit(ctx, estimator_rows(reports), REPORT_COLUMNS, title=f"Dual estimators (N={stats.N}, n={n})")


@report.command()
@click.option(
    "--estimator",
    "estimators",
    type=click.Choice([estimator.value for estimator in MeanEstimator]),
    multiple=True,
    help="Repeatable; every member when omitted",
)
@click.option(
    "--mode",
    type=click.Choice([mode.value for mode in ExpansionMode]),
    default=ExpansionMode.AS_PRINTED.value,
    show_default=True,
)
@click.option("--order", type=click.Choice(["1", "2"]), default="2", show_default=True)
@click.option("--n", type=click.IntRange(min=2), help="Sample size")
@click.option("--value", type=float, help="Tuning parameter; the first-order optimum when omitted")
@click.option("--c20", type=float, help="C_20 for the builtin moments; back-solved when omitted")
@click.pass_context
def family(ctx: click.Context, estimators, mode: str, order: str, n, value, c20) -> None:
    """First- and second-order bias and MSE of the ratio-type mean family."""
    moments, N, n, mean_y = family_inputs(ctx, n, c20)
    coeffs = design_coefficients(N, n)
    manager = MeanFamilyManager(ExpansionMode(mode))
    reports = []
    for estimator in [MeanEstimator(item) for item in estimators] or list(MeanEstimator):
        tuning = value
        if tuning is None:
            tuning = manager.family_optimum(moments, coeffs, estimator, mean_y).value
        params = MeanFamilyParams(estimator).tuned(tuning)
        if order == "1":
            result = manager.first_order_report(moments, coeffs, mean_y, params)
        else:
            result = manager.second_order_report(moments, coeffs, mean_y, params)
        note = f"{TUNING_PARAMETER[estimator]}={tuning:.6g}; {result.note}"
        reports.append(replace(result, note=note))
    emit(ctx, estimator_rows(reports), REPORT_COLUMNS, title=f"Mean family (N={N}, n={n})")


@report.command()
@click.option(
    "--n",
    type=click.IntRange(min=2),
    help="Sample size; best fit to the printed t6 PRE when omitted",
)
@click.option(
    "--mode",
    type=click.Choice([mode.value for mode in OptimaMode]),
    default=OptimaMode.AS_PRINTED.value,
    show_default=True,
    help="How w1, K6 and K7 are chosen",
)
@click.option("--t2-variant", type=click.Choice([v.value for v in FormulaVariant]), default="as-printed")
@click.option("--t3-variant", type=click.Choice([v.value for v in FormulaVariant]), default="as-printed")
@click.option("--ybar", type=float, help="Sample mean of y, for point estimates")
@click.option("--p1", "sample_p1", type=float, help="Sample proportion of phi1")
@click.option("--p2", "sample_p2", type=float, help="Sample proportion of phi2")
@click.pass_context
def attributes(
    ctx: click.Context,
    n,
    mode: str,
    t2_variant: str,
    t3_variant: str,
    ybar,
    sample_p1,
    sample_p2,
) -> None:
    """Estimators t1..t7 built on two auxiliary attributes."""
    summary = attribute_inputs(ctx)
    manager = AttributeManager(FormulaVariant(t2_variant), FormulaVariant(t3_variant))
    if n is None:
        if ctx.obj.get("input") is not None:
            raise click.UsageError("--n is required with --input", ctx)
        n = manager.best_fit_sample_size(summary, PUBLISHED_TABLES["ch2-table4.1"]["t6"]).n
        console.print(f"Using best-fit n = {n}", style=WARNING_STYLE)
    f1 = 1.0 / n - 1.0 / summary.N
    optima = manager.attr_optima(summary, f1, OptimaMode(mode))
    reports = manager.attr_report(summary, f1, optima.params)
    if ybar is not None:
        if sample_p1 is None or sample_p2 is None:
            raise click.UsageError("point estimates need --ybar, --p1 and --p2", ctx)
        points = manager.attr_points(ybar, sample_p1, sample_p2, summary.p1, summary.p2, optima.params)
        reports = [replace(item, point=points[item.estimator]) for item in reports]
    emit(ctx, estimator_rows(reports), REPORT_COLUMNS, title=f"Attribute estimators (n={n})")


@report.command()
@click.option("--n", type=click.IntRange(min=2), help="Sample size; required with --input")
@click.option("--alpha", "alphas", type=float, multiple=True, help="Repeatable factor-type alpha")
@click.option("--w2", type=click.FloatRange(0.0, 1.0), default=0.0, show_default=True)
@click.option("--bigL", "big_l", type=click.FloatRange(min=1.0, min_open=True), default=2.0, show_default=True)
@click.option("--s2-y2", type=click.FloatRange(min=0.0), help="Mean square of the non-response stratum")
@click.option("--xbar", type=float, help="Sample mean of x, for point estimates")
@click.option("--ybar-star", type=float, help="Non-response adjusted sample mean of y")
@click.pass_context
def systematic(ctx: click.Context, n, alphas, w2: float, big_l: float, s2_y2, xbar, ybar_star) -> None:
    """Classical and factor-type estimators under systematic sampling with non-response."""
    summary = systematic_inputs(ctx, n)
    if s2_y2 is None:
        s2_y2 = summary.s2_y if ctx.obj.get("input") else DATASETS["ch1-murthy"].payload["s2_y2"]
    nr = NonResponseSpec(w2, big_l, s2_y2)
    manager = SystematicManager()
    reports = manager.sys_classical_report(summary, nr)
    for alpha in alphas:
        reports.append(manager.factor_report(alpha, summary, nr))
    optimum = manager.alpha_optimum(summary, nr)
    best = manager.factor_report(optimum.chosen, summary, nr)
    roots = ", ".join(f"{root:.6g}" for root in optimum.roots)
    reports.append(replace(best, note=f"optimum; real roots {roots}"))
    if ybar_star is not None and xbar is not None:
        slope = summary.rho * (summary.s2_y / summary.s2_x) ** 0.5
        points = manager.sys_points(ybar_star, xbar, summary.mean_x, summary.f, slope)
        for alpha in (*alphas, optimum.chosen):
            points[f"T(alpha={alpha:g})"] = manager.factor_point(
                ybar_star, xbar, summary.mean_x, alpha, summary.f
            )
        reports = [replace(item, point=points.get(item.estimator)) for item in reports]
    title = f"Systematic sampling (W2={w2:g}, L={big_l:g})"
    emit(ctx, estimator_rows(reports), REPORT_COLUMNS, title=title)


@report.command()
@click.option("--n", type=click.IntRange(min=2), help="Second-phase sample size")
@click.option("--n-prime", type=click.IntRange(min=3), help="First-phase sample size")
@click.option(
    "--mode",
    type=click.Choice([mode.value for mode in VarianceOptimaMode]),
    default=VarianceOptimaMode.GRID.value,
    show_default=True,
)
@click.option(
    "--t3-sign",
    type=click.Choice([sign.value for sign in ProductSign]),
    default=ProductSign.PLUS.value,
    show_default=True,
)
@click.pass_context
def variance(ctx: click.Context, n, n_prime, mode: str, t3_sign: str) -> None:
    """Estimators of the population variance, single-phase and two-phase."""
    partials, n, n_prime, s2_y = variance_inputs(ctx, n, n_prime)
    manager = VarianceManager(ProductSign(t3_sign))
    optima_mode = VarianceOptimaMode(mode)
    reports = manager.var_single_report(partials, n, mode=optima_mode, s2_y=s2_y)
    if n_prime is not None:
        reports += manager.var_twophase_report(partials, n, n_prime, mode=optima_mode, s2_y=s2_y)
    logger.debug("variance report with n=%d n'=%s", n, n_prime)
    emit(ctx, estimator_rows(reports), REPORT_COLUMNS, title=f"Variance estimators (n={n})")
