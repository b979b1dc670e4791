import numpy as np
import pytest

from datasets.builtin import DATASETS, PUBLISHED_TABLES
from managers.dual_ratio_product_manager import (
    CLASSICAL_ESTIMATORS,
    DualRatioProductManager,
    dual_transform,
)
from managers.oracle_manager import OracleManager
from managers.population_manager import PopulationManager, design_coefficients
from managers.report_manager import published_stats
from models.dual_model import DualPRParams, SampleMeans
from models.oracle_model import DesignKind, DesignSpec
from models.population_model import SummaryStats
from utils.errors import DegenerateOptimumError, DomainError, IncompleteInputError
from utils.optimize import grid_minimize


@pytest.fixture
def manager():
    return DualRatioProductManager()


@pytest.fixture
def raw_stats(pop2):
    return PopulationManager().summarize_numeric(pop2)


class TestClassical:
    def test_mean_per_unit(self, manager, raw_stats):
        coeffs = design_coefficients(10, 4)
        assert manager.classical_mse(raw_stats, coeffs, "ybar") == pytest.approx(0.15 * 66.0)

    def test_ratio_mse(self, manager, raw_stats):
        coeffs = design_coefficients(10, 4)
        r1 = 52.0 / 42.0
        expected = 0.15 * (66.0 + r1**2 * 30.0 - 2 * r1 * 319.0 / 9.0)
        assert manager.classical_mse(raw_stats, coeffs, "R") == pytest.approx(expected)

    def test_regression_bound(self, manager, raw_stats):
        coeffs = design_coefficients(10, 4)
        st = manager.classical_mse(raw_stats, coeffs, "ST")
        assert st == pytest.approx(0.15 * 66.0 * (1 - raw_stats.rho_yx**2))

    @pytest.mark.parametrize("dataset_id", ["ch4-pop1", "ch4-pop2"])
    def test_published_efficiencies(self, manager, dataset_id):
        stats = published_stats(dataset_id)
        coeffs = design_coefficients(stats.N, DATASETS[dataset_id].payload["n"])
        printed = PUBLISHED_TABLES["ch4-table2"][dataset_id.split("-")[1]]
        reports = {report.estimator: report for report in manager.classical_report(stats, coeffs)}
        for estimator in ("R", "P", "R*", "P*", "ST"):
            assert reports[estimator].pre == pytest.approx(printed[estimator], rel=0.015)

    def test_missing_auxiliary(self, manager):
        stats = SummaryStats.from_published(N=20, mean_y=10.0, var_y=4.0, mean_x=5.0, var_x=1.0, rho_yx=0.5)
        with pytest.raises(IncompleteInputError, match="P needs"):
            manager.classical_mse(stats, design_coefficients(20, 5), "P")

    def test_points(self, manager, raw_stats):
        coeffs = design_coefficients(10, 4)
        sample = SampleMeans(y=50.0, x=40.0, z=205.0)
        assert manager.classical_point(raw_stats, coeffs, "R", sample) == pytest.approx(50.0 * 42.0 / 40.0)
        assert manager.classical_point(raw_stats, coeffs, "P", sample) == pytest.approx(50.0 * 205.0 / 200.0)
        x_star = dual_transform(40.0, 42.0, coeffs.g)
        assert manager.classical_point(raw_stats, coeffs, "R*", sample) == pytest.approx(50.0 * x_star / 42.0)

    def test_point_needs_sample_mean(self, manager, raw_stats):
        with pytest.raises(IncompleteInputError):
            manager.classical_point(raw_stats, design_coefficients(10, 4), "R", SampleMeans(y=50.0))

    def test_dual_transform_needs_positive_g(self):
        with pytest.raises(DomainError):
            dual_transform(4.0, 5.0, 0.0)

    def test_dual_transform_is_unbiased(self, pop2):
        # (1+g) X - g xbar has mean X under SRSWOR
        assert dual_transform(42.0, 42.0, 0.5) == pytest.approx(42.0)
        g = 4.0 / 6.0
        result = OracleManager().enumerate_design(
            pop2,
            DesignSpec(kind=DesignKind.SRSWOR, n=4),
            lambda draw: dual_transform(draw.mean("x"), 42.0, g),
            target=42.0,
        )
        assert result.count == 210
        assert result.mean == pytest.approx(42.0, rel=1e-12)

    def test_dual_transform_reverses_covariance(self, pop2):
        g = 4.0 / 6.0
        spec = DesignSpec(kind=DesignKind.SRSWOR, n=4)
        oracle = OracleManager()
        plain = oracle.enumerate_design(
            pop2, spec, lambda draw: (draw.mean("y") - 52.0) * (draw.mean("x") - 42.0), target=0.0
        )
        dual = oracle.enumerate_design(
            pop2,
            spec,
            lambda draw: (draw.mean("y") - 52.0) * (dual_transform(draw.mean("x"), 42.0, g) - 42.0),
            target=0.0,
        )
        # lambda S_yx with lambda = 0.15 and S_yx = 319/9
        assert plain.mean == pytest.approx(0.15 * 319.0 / 9.0, rel=1e-12)
        assert dual.mean == pytest.approx(-g * plain.mean, rel=1e-12)


class TestDualRatioProduct:
    def test_optimum_beats_grid(self, manager, raw_stats):
        coeffs = design_coefficients(10, 4)
        summary = manager.pr_optimum(raw_stats, coeffs)
        grid = grid_minimize(lambda theta: manager.pr_mse(raw_stats, coeffs, theta), -20.0, 20.0)
        assert summary.min_mse <= grid.minimum * (1 + 1e-12)
        assert summary.min_mse == pytest.approx(grid.minimum, rel=1e-9)
        assert manager.pr_mse(raw_stats, coeffs, summary.theta0) == pytest.approx(summary.min_mse)

    def test_minimum_closed_form(self, manager, raw_stats):
        coeffs = design_coefficients(10, 4)
        summary = manager.pr_optimum(raw_stats, coeffs)
        assert summary.min_mse == pytest.approx(coeffs.lam * (66.0 - summary.d**2 / summary.c))
        assert summary.e + summary.f == pytest.approx(coeffs.g)

    def test_theta_one_is_dual_ratio_product(self, manager, raw_stats):
        coeffs = design_coefficients(10, 4)
        assert manager.pr_mse(raw_stats, coeffs, 1.0) == pytest.approx(
            manager.classical_mse(raw_stats, coeffs, "SE")
        )
        sample = SampleMeans(y=50.0, x=40.0, z=205.0)
        assert manager.pr_point(raw_stats, coeffs, DualPRParams(1.0), sample) == pytest.approx(
            manager.classical_point(raw_stats, coeffs, "SE", sample)
        )

    def test_report(self, manager, raw_stats):
        coeffs = design_coefficients(10, 4)
        report = manager.pr_report(raw_stats, coeffs, DualPRParams(0.4))
        assert report.estimator == "PR"
        assert report.mse1 == pytest.approx(manager.pr_mse(raw_stats, coeffs, 0.4))
        assert report.pre == pytest.approx(100.0 * 0.15 * 66.0 / report.mse1)
        assert report.point is None

    def test_report_rejects_infinite_theta(self, manager, raw_stats):
        with pytest.raises(DomainError):
            manager.pr_report(raw_stats, design_coefficients(10, 4), DualPRParams(np.inf))

    def test_vectorized_mse(self, manager, raw_stats):
        coeffs = design_coefficients(10, 4)
        thetas = np.array([0.0, 0.5, 1.0])
        values = manager.pr_mse(raw_stats, coeffs, thetas)
        assert values[1] == pytest.approx(manager.pr_mse(raw_stats, coeffs, 0.5))

    def test_uncorrelated_auxiliaries_without_signal(self, manager):
        stats = SummaryStats.from_published(
            N=20, mean_y=10.0, var_y=4.0, mean_x=5.0, var_x=0.0, mean_z=8.0, var_z=0.0,
            rho_yx=0.0, rho_yz=0.0, rho_zx=0.0,
        )
        with pytest.raises(DegenerateOptimumError):
            manager.pr_optimum(stats, design_coefficients(20, 5))


class TestEfficiencyConditions:
    def test_direct_comparison_matches_mse(self, manager, raw_stats):
        coeffs = design_coefficients(10, 4)
        theta = manager.pr_optimum(raw_stats, coeffs).theta0
        conditions = manager.efficiency_conditions(raw_stats, coeffs, theta)
        assert [condition.competitor for condition in conditions] == list(CLASSICAL_ESTIMATORS)
        for condition in conditions:
            assert condition.holds == (condition.mse_difference < 0)

    def test_optimum_never_loses_to_dual_ratio_product(self, manager, raw_stats):
        coeffs = design_coefficients(10, 4)
        theta = manager.pr_optimum(raw_stats, coeffs).theta0
        by_name = {c.competitor: c for c in manager.efficiency_conditions(raw_stats, coeffs, theta)}
        assert by_name["SE"].mse_difference <= 1e-12


class TestPercentRelativeEfficiency:
    def test_values(self):
        assert DualRatioProductManager.pre(3.0, 3.0) == pytest.approx(100.0)
        assert DualRatioProductManager.pre(2.0, 1.0) == pytest.approx(200.0)

    def test_needs_positive_mse(self):
        with pytest.raises(DomainError):
            DualRatioProductManager.pre(2.0, 0.0)
