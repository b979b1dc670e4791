import json
from dataclasses import asdict, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Union

import pandas as pd

from datasets.builtin import DATA_DIR, DATASETS, PUBLISHED_TABLES, builtin_dataset
from managers.attribute_manager import AttributeManager
from managers.dual_ratio_product_manager import DualRatioProductManager
from managers.mean_family_manager import MeanFamilyManager
from managers.population_manager import PopulationManager, design_coefficients
from managers.systematic_manager import SystematicManager
from managers.variance_manager import VarianceManager
from models.attribute_model import OptimaMode
from models.mean_family_model import ExpansionMode, MeanEstimator, MeanFamilyParams
from models.moment_model import MomentSource, MomentTable, PartialMomentTable
from models.population_model import (
    COLUMNS,
    AttributeSummary,
    FinitePopulation,
    SummaryStats,
)
from models.report_model import (
    CellTolerance,
    DatasetDescriptor,
    ReproductionReport,
    ReproductionRow,
    ReproductionStatus,
    ToleranceClass,
)
from models.systematic_model import NonResponseSpec, SystematicSummary
from models.variance_model import VarianceOptimaMode
from utils.errors import InputOutputError, SchemaError, UnknownIdentifierError
from utils.logger import configure_logger

logger = configure_logger(__name__)

TOLERANCES_FILE = DATA_DIR / "tolerances.json"
TABLE_IDS = tuple(PUBLISHED_TABLES)
REPRODUCTION_COLUMNS = (
    "cell_id",
    "paper_value",
    "computed_value",
    "rel_residual",
    "status",
    "tolerance",
    "note",
)


def load_tolerances(profile: Union[str, Path] = "default") -> Dict[str, Any]:
    """Reads a tolerance profile: ``default``, ``strict`` (halved) or a JSON file."""
    path = TOLERANCES_FILE if profile in ("default", "strict") else Path(profile)
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as error:
        raise InputOutputError(f"cannot read tolerance profile '{path}': {error.strerror}") from error
    except json.JSONDecodeError as error:
        raise InputOutputError(f"'{path}' is not valid JSON: line {error.lineno}") from error
    if profile == "strict":
        for table in data.values():
            for entry in [table.get("default", {}), *table.get("cells", {}).values()]:
                if "tolerance" in entry:
                    entry["tolerance"] = entry["tolerance"] / 2
    return data


def load_population(path: Union[str, Path], schema: Optional[Mapping[str, str]] = None) -> FinitePopulation:
    """Reads a CSV file into a population, keeping file row order.

    ``schema`` maps roles (y, x, z, phi1, phi2, responder, stratum) to file
    column names; without it, columns named after the roles are used.
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError:
        raise InputOutputError(f"input file '{path}' does not exist") from None
    except (OSError, pd.errors.ParserError, UnicodeDecodeError) as error:
        raise InputOutputError(f"cannot read '{path}': {error}") from error

    if schema is None:
        schema = {role: role for role in COLUMNS if role in frame.columns}
    unknown = set(schema) - set(COLUMNS)
    if unknown:
        raise SchemaError(f"unknown roles in schema: {', '.join(sorted(unknown))}")
    if "y" not in schema:
        raise SchemaError("schema must map the study variable y")
    missing = [column for column in schema.values() if column not in frame.columns]
    if missing:
        raise SchemaError(f"'{path}' is missing columns: {', '.join(missing)}")

    columns: Dict[str, Any] = {}
    for role, column in schema.items():
        if role == "stratum":
            columns[role] = tuple(frame[column].tolist())
            continue
        values = pd.to_numeric(frame[column], errors="coerce")
        bad = values.isna()
        if bad.any():
            row = int(bad.to_numpy().argmax())
            raise InputOutputError(
                f"'{path}' line {row + 2}: column '{column}' has non-numeric value "
                f"'{frame[column].iloc[row]}'"
            )
        columns[role] = values.to_numpy(dtype=float)
    logger.debug("loaded %d rows from %s", len(frame), path)
    return FinitePopulation(**columns)


def murthy_systematic() -> SystematicSummary:
    p = DATASETS["ch1-murthy"].payload
    return SystematicSummary(
        N=p["N"],
        n=p["n"],
        mean_y=p["mean_y"],
        mean_x=p["mean_x"],
        s2_y=p["s2_y"],
        s2_x=p["s2_x"],
        rho=p["rho"],
        rho_y=p["rho_y"],
        rho_x=p["rho_x"],
        calibrated=True,
    )


def pakrice_summary() -> AttributeSummary:
    p = DATASETS["ch2-pakrice"].payload
    return AttributeSummary(
        N=p["N"],
        mean_y=p["mean_y"],
        var_y=p["var_y"],
        p1=p["p1"],
        p2=p["p2"],
        var_phi1=p["var_phi1"],
        var_phi2=p["var_phi2"],
        rho_pb1=p["rho_pb1"],
        rho_pb2=p["rho_pb2"],
        rho_phi=p["rho_phi"],
        source="published",
    )


def aligarh_moments(c20: float) -> MomentTable:
    """Published C_pq of the census data with a supplied C_20."""
    p = DATASETS["ch3-aligarh"].payload
    entries = {(int(key[1]), int(key[2])): value for key, value in p.items() if key.startswith("C")}
    entries[(2, 0)] = c20
    return MomentTable(entries, MomentSource.USER_SUPPLIED, {"C20": "back-solved"})


def backsolved_c20() -> float:
    """C_20 at which the common first-order MSE equals the printed one."""
    p = DATASETS["ch3-aligarh"].payload
    coeffs = design_coefficients(p["N"], p["n"])
    target = PUBLISHED_TABLES["ch3-table6.1"]["mse1"]
    return p["C11"] ** 2 / (p["C02"] - target / (p["mean_y"] ** 2 * coeffs.l1))


def published_stats(dataset_id: str) -> SummaryStats:
    p = DATASETS[dataset_id].payload
    return SummaryStats.from_published(
        N=p["N"],
        mean_y=p["mean_y"],
        var_y=p["var_y"],
        mean_x=p["mean_x"],
        var_x=p["var_x"],
        mean_z=p["mean_z"],
        var_z=p["var_z"],
        rho_yx=p["rho_yx"],
        rho_yz=p["rho_yz"],
        rho_zx=p["rho_zx"],
    )


def murthy67_partials() -> PartialMomentTable:
    p = DATASETS["ch5-murthy67"].payload
    entries = {
        (int(key[1]), int(key[2]), int(key[3])): value
        for key, value in p.items()
        if key.startswith("d")
    }
    return PartialMomentTable(entries, MomentSource.USER_SUPPLIED)


class ReportManager:
    """Business logic for builtin datasets and published-table reproduction."""

    def __init__(self, profile: Union[str, Path] = "default") -> None:
        self.profile = str(profile)
        self.tolerances = load_tolerances(profile)
        self._builders: Dict[str, Callable[[], List[tuple]]] = {
            "ch1-table1": self._ch1_table1,
            "ch2-table4.1": self._ch2_table41,
            "ch3-table6.1": self._ch3_table61,
            "ch4-table2": self._ch4_table2,
            "ch5-table5.1": self._ch5_table51,
            "ch5-table5.2": self._ch5_table52,
        }

    def builtin_dataset(self, dataset_id: str) -> DatasetDescriptor:
        return builtin_dataset(dataset_id)

    def load_population(self, path: Union[str, Path], schema: Optional[Mapping[str, str]] = None):
        return load_population(path, schema)

    def tolerance_for(self, table_id: str, cell_id: str) -> CellTolerance:
        """Most specific entry for the cell, trying shorter ':'-separated prefixes."""
        table = self.tolerances.get(table_id, {})
        cells = table.get("cells", {})
        parts = cell_id.split(":")
        entry = None
        for size in range(len(parts), 0, -1):
            entry = cells.get(":".join(parts[:size]))
            if entry is not None:
                break
        entry = entry or table.get("default", {"class": "info"})
        return CellTolerance(
            tolerance_class=ToleranceClass(entry.get("class", "info")),
            tolerance=float(entry.get("tolerance", 0.0)),
            note=entry.get("note", ""),
            absolute=bool(entry.get("absolute", False)),
        )

    def reproduce_table(self, table_id: str) -> ReproductionReport:
        """Computes every reproducible cell of a published table and classifies it."""
        if table_id not in self._builders:
            known = ", ".join(TABLE_IDS)
            raise UnknownIdentifierError(f"unknown table '{table_id}' (known: {known})")
        cells, notes = self._builders[table_id]()
        rows = tuple(
            self._row(table_id, cell_id, paper, computed, note)
            for cell_id, paper, computed, note in cells
        )
        report = ReproductionReport(table_id, rows, self.profile, tuple(notes))
        for row in report.failures:
            logger.warning(
                "%s %s: %.6g vs %.6g", table_id, row.cell_id, row.computed_value, row.paper_value
            )
        return report

    @staticmethod
    def report_rows(report: ReproductionReport) -> List[Dict[str, Any]]:
        rows = []
        for row in report.rows:
            record = asdict(row)
            record["status"] = row.status.value
            rows.append(record)
        return rows

    def _row(self, table_id, cell_id, paper, computed, note) -> ReproductionRow:
        tolerance = self.tolerance_for(table_id, cell_id)
        computed = float("nan") if computed is None else float(computed)
        if paper is None:
            residual = None
        elif tolerance.absolute or paper == 0:
            residual = computed - paper
        else:
            residual = (computed - paper) / abs(paper)
        klass = tolerance.tolerance_class
        if paper is None or klass is ToleranceClass.INFO:
            status = ReproductionStatus.COMPUTED_ONLY
        elif klass is ToleranceClass.DISCREPANCY:
            status = ReproductionStatus.DOCUMENTED_DISCREPANCY
        elif abs(residual) <= tolerance.tolerance:
            status = (
                ReproductionStatus.MATCH
                if klass is ToleranceClass.MATCH
                else ReproductionStatus.LOOSE_MATCH
            )
        else:
            status = ReproductionStatus.MISMATCH
        return ReproductionRow(
            cell_id=cell_id,
            paper_value=paper,
            computed_value=computed,
            rel_residual=residual,
            status=status,
            tolerance=tolerance.tolerance,
            note="; ".join(part for part in (note, tolerance.note) if part),
        )

    def _ch1_table1(self):
        published = PUBLISHED_TABLES["ch1-table1"]
        p = DATASETS["ch1-murthy"].payload
        manager = SystematicManager()
        first_w2 = published["w2"][0]
        summary = manager.calibrate_intraclass(
            replace(murthy_systematic(), rho_y=0.0, rho_x=0.0, calibrated=False),
            NonResponseSpec(first_w2, p["big_l"], p["s2_y2"]),
            published["rows"]["alpha=4"][0],
        )
        computed: Dict[str, List[float]] = {}
        for w2 in published["w2"]:
            nr = NonResponseSpec(w2, p["big_l"], p["s2_y2"])
            for alpha in (1, 2, 3, 4):
                computed.setdefault(f"alpha={alpha}", []).append(
                    manager.factor_report(float(alpha), summary, nr).mse1
                )
            computed.setdefault("alpha=opt", []).append(manager.alpha_optimum(summary, nr).min_mse)
        cells = []
        for row_id, printed in published["rows"].items():
            for w2, paper, value in zip(published["w2"], printed, computed[row_id]):
                cells.append((f"{row_id}:w2={w2:g}", paper, value, ""))
            for index in range(len(printed) - 1):
                span = f"{published['w2'][index]:g}-{published['w2'][index + 1]:g}"
                cells.append(
                    (
                        f"increment:{row_id}:{span}",
                        printed[index + 1] - printed[index],
                        computed[row_id][index + 1] - computed[row_id][index],
                        "",
                    )
                )
        notes = [f"rho_Y = rho_X = {summary.rho_y:.6g}, calibrated on the alpha=4, W2={first_w2:g} cell"]
        return cells, notes

    def _ch2_table41(self):
        published = PUBLISHED_TABLES["ch2-table4.1"]
        summary = pakrice_summary()
        manager = AttributeManager()
        fit = manager.best_fit_sample_size(summary, published["t6"], "t6")
        f1 = 1.0 / fit.n - 1.0 / summary.N
        printed = manager.attr_optima(summary, f1, OptimaMode.AS_PRINTED)
        minimizing = manager.attr_optima(summary, f1, OptimaMode.MINIMIZING)
        reports = {report.estimator: report for report in manager.attr_report(summary, f1, printed.params)}
        cells = [
            (name, published[name], reports[name].pre, f"n = {fit.n}" if name == "t6" else "")
            for name in ("t1", "t2", "t3", "t4", "t5", "t6", "t7")
        ]
        baseline = summary.mean_y**2 * f1 * summary.cv_y**2
        cells.append(
            (
                "t5:minimizing",
                None,
                100.0 * baseline / minimizing.mse["t5"],
                f"w1 = {minimizing.params.w1:.6g}",
            )
        )
        notes = [f"best-fit n = {fit.n} for t6 (relative residual {fit.rel_residual:.3g})"]
        return cells, notes

    def _ch3_table61(self):
        published = PUBLISHED_TABLES["ch3-table6.1"]
        p = DATASETS["ch3-aligarh"].payload
        coeffs = design_coefficients(p["N"], p["n"])
        mean_y = p["mean_y"]
        target = published["mse1"]
        c20 = backsolved_c20()
        moments = aligarh_moments(c20)
        manager = MeanFamilyManager(ExpansionMode.AS_PRINTED)
        cells = []
        for estimator in MeanEstimator:
            name = estimator.value
            optimum = manager.family_optimum(moments, coeffs, estimator, mean_y)
            params = MeanFamilyParams(estimator).tuned(optimum.value)
            report = manager.second_order_report(moments, coeffs, mean_y, params)
            note = f"{optimum.parameter} = {optimum.value:.6g}"
            cells.extend(
                [
                    (f"mse1:{name}", target, optimum.mse1, note),
                    (f"bias1:{name}", published["bias1"][name], report.bias1, note),
                    (f"bias2:{name}", published["bias2"][name], report.bias2, note),
                    (f"mse2:{name}", published["mse2"][name], report.mse2, note),
                ]
            )
        notes = [f"C20 = {c20:.6g}, back-solved from the common first-order MSE"]
        return cells, notes

    def _ch4_table2(self):
        published = PUBLISHED_TABLES["ch4-table2"]
        manager = DualRatioProductManager()
        population = load_population(DATASETS["ch4-pop2"].payload["csv"])
        raw = PopulationManager().summarize_numeric(population)
        sources = {
            "pop1": (published_stats("ch4-pop1"), published_stats("ch4-pop1")),
            "pop2": (published_stats("ch4-pop2"), raw),
        }
        cells = []
        for pop_id, (summary, covariances) in sources.items():
            n = DATASETS[f"ch4-{pop_id}"].payload["n"]
            coeffs = design_coefficients(summary.N, n)
            for estimator, paper in published[pop_id].items():
                stats = covariances if estimator in ("S", "SE", "PR") else summary
                if estimator == "PR":
                    optimum = manager.pr_optimum(stats, coeffs)
                    value = 100.0 * coeffs.lam * stats.var_y / optimum.min_mse
                    note = f"theta0 = {optimum.theta0:.6g}"
                else:
                    mse = manager.classical_mse(stats, coeffs, estimator)
                    value = 100.0 * coeffs.lam * stats.var_y / mse
                    note = ""
                if stats is raw:
                    note = "; ".join(part for part in ("raw data", note) if part)
                cells.append((f"{pop_id}:{estimator}", paper, value, note))
        return cells, ["Population II uses the raw-data rho_zx = -0.7333 in summary mode"]

    def _ch5_table51(self):
        published = PUBLISHED_TABLES["ch5-table5.1"]
        n = DATASETS["ch5-murthy67"].payload["n"]
        reports = VarianceManager().var_single_report(murthy67_partials(), n, mode=VarianceOptimaMode.GRID)
        cells = [(report.estimator, published[report.estimator], report.pre, "") for report in reports]
        return cells, []

    def _ch5_table52(self):
        published = PUBLISHED_TABLES["ch5-table5.2"]
        payload = DATASETS["ch5-murthy67"].payload
        n, n_prime = payload["n"], payload["n_prime"]
        reports = VarianceManager().var_twophase_report(
            murthy67_partials(), n, n_prime, mode=VarianceOptimaMode.GRID
        )
        cells = [(report.estimator, published[report.estimator], report.pre, "") for report in reports]
        mse = {report.estimator: report.mse1 for report in reports}
        dominated = mse["t7'"] <= min(mse["t5'"], mse["t6'"]) + 1e-12
        notes = [
            "MSE(t7') <= min(MSE(t5'), MSE(t6')): " + ("holds" if dominated else "VIOLATED")
        ]
        return cells, notes
