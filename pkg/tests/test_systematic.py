from dataclasses import replace

import numpy as np
import pytest

from datasets.builtin import DATASETS, PUBLISHED_TABLES
from managers.oracle_manager import OracleManager, factor_type_estimator
from managers.report_manager import murthy_systematic
from managers.systematic_manager import SystematicManager
from models.oracle_model import DesignKind, DesignSpec, NonResponseDesign
from models.population_model import FinitePopulation
from models.systematic_model import FactorTypeParams, NonResponseSpec, SystematicSummary
from utils.errors import (
    DegenerateMomentError,
    DesignError,
    DomainError,
    SingularFamilyError,
)

PAYLOAD = DATASETS["ch1-murthy"].payload


@pytest.fixture
def manager():
    return SystematicManager()


@pytest.fixture
def summary():
    return murthy_systematic()


def nonresponse(w2):
    return NonResponseSpec(w2, PAYLOAD["big_l"], PAYLOAD["s2_y2"])


def population_summary(manager, population, n):
    y, x = population.y, population.x
    return SystematicSummary(
        N=population.N,
        n=n,
        mean_y=float(y.mean()),
        mean_x=float(x.mean()),
        s2_y=float(y.var(ddof=1)),
        s2_x=float(x.var(ddof=1)),
        rho=float(np.corrcoef(y, x)[0, 1]),
        rho_y=manager.intraclass_correlation(y, n),
        rho_x=manager.intraclass_correlation(x, n),
    )


def uncorrelated_summary(rho):
    """Equal CVs and no intraclass correlation, so rho* K = rho."""
    return SystematicSummary(
        N=48, n=6, mean_y=10.0, mean_x=5.0, s2_y=4.0, s2_x=1.0, rho=rho, rho_y=0.0, rho_x=0.0
    )


class TestFactorType:
    @pytest.mark.parametrize(
        "alpha, classical", [(1.0, "ratio"), (2.0, "product"), (3.0, "dual"), (4.0, "mean")]
    )
    def test_reduces_to_classical_estimators(self, manager, summary, alpha, classical):
        nr = nonresponse(0.2)
        classical_rows = {r.estimator: r for r in manager.sys_classical_report(summary, nr)}
        factor = manager.factor_report(alpha, summary, nr)
        assert factor.mse1 == pytest.approx(classical_rows[classical].mse1, rel=1e-12)
        assert factor.bias1 == pytest.approx(classical_rows[classical].bias1, rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize(
        "alpha, classical", [(1.0, "ratio"), (2.0, "product"), (3.0, "dual"), (4.0, "mean")]
    )
    def test_points_reduce_to_classical(self, manager, alpha, classical):
        points = manager.sys_points(250.0, 6.5, 7.0, 0.1)
        assert manager.factor_point(250.0, 6.5, 7.0, alpha, 0.1) == pytest.approx(points[classical])

    def test_coefficients(self):
        params = FactorTypeParams(alpha=5.0, f=0.25)
        assert (params.a, params.b, params.c) == (12.0, 4.0, 6.0)
        assert params.phi == pytest.approx(params.phi2 - params.phi1)

    def test_alpha_must_be_positive(self):
        with pytest.raises(DomainError):
            FactorTypeParams(alpha=0.0, f=0.2)

    def test_singular_family(self):
        # A + fB + C = 2 - 2f at alpha = 3
        with pytest.raises(SingularFamilyError):
            FactorTypeParams(alpha=3.0, f=1.0)

    def test_sampling_fraction_range(self, manager):
        with pytest.raises(DesignError):
            manager.factor_coefficients(1.0, 1.0)


class TestAlphaOptimum:
    @pytest.mark.parametrize("w2", PUBLISHED_TABLES["ch1-table1"]["w2"])
    def test_optimum_attains_regression_mse(self, manager, summary, w2):
        optimum = manager.alpha_optimum(summary, nonresponse(w2))
        assert optimum.min_mse == pytest.approx(optimum.regression_mse, rel=1e-12)
        params = manager.factor_coefficients(optimum.chosen, summary.f)
        assert abs(params.phi - optimum.target) < 1e-9
        assert all(root > 0 for root in optimum.roots)
        assert optimum.chosen == min(optimum.roots)

    def test_optimum_beats_fixed_alphas(self, manager, summary):
        nr = nonresponse(0.1)
        optimum = manager.alpha_optimum(summary, nr)
        for alpha in (1.0, 2.0, 3.0, 4.0):
            assert optimum.min_mse <= manager.factor_report(alpha, summary, nr).mse1

    def test_unit_target_selects_ratio_estimator(self, manager):
        summary = uncorrelated_summary(1.0)
        optimum = manager.alpha_optimum(summary, NonResponseSpec(0.1, 2.0, 3.0))
        assert optimum.target == pytest.approx(1.0)
        f = summary.f
        assert list(optimum.roots) == pytest.approx([1.0, (2.0 + 8.0 * f) / (1.0 + 2.0 * f)])
        assert optimum.chosen == pytest.approx(1.0)

    def test_zero_target_includes_sample_mean(self, manager):
        summary = uncorrelated_summary(0.0)
        nr = NonResponseSpec(0.1, 2.0, 3.0)
        optimum = manager.alpha_optimum(summary, nr)
        assert optimum.target == 0.0
        assert any(root == pytest.approx(4.0) for root in optimum.roots)
        for root in optimum.roots:
            assert abs(manager.factor_coefficients(root, summary.f).phi) < 1e-9
        assert optimum.min_mse == pytest.approx(manager.factor_report(4.0, summary, nr).mse1, rel=1e-12)

    def test_nonresponse_increment(self, manager, summary):
        increment = PUBLISHED_TABLES["ch1-table1"]["increment"]
        low = manager.factor_report(1.0, summary, nonresponse(0.1)).mse1
        high = manager.factor_report(1.0, summary, nonresponse(0.2)).mse1
        assert high - low == pytest.approx(increment, rel=0.01)


class TestNonResponseTerm:
    def test_every_mse_is_affine_in_w2(self, manager, summary):
        slope = (PAYLOAD["big_l"] - 1.0) / summary.n * PAYLOAD["s2_y2"]

        def mse_by_estimator(w2):
            nr = nonresponse(w2)
            rows = {row.estimator: row.mse1 for row in manager.sys_classical_report(summary, nr)}
            for alpha in (1.0, 2.0, 2.5, 3.0, 4.0, 6.0):
                rows[f"T({alpha:g})"] = manager.factor_report(alpha, summary, nr).mse1
            rows["optimum"] = manager.alpha_optimum(summary, nr).min_mse
            return rows

        base = mse_by_estimator(0.0)
        for w2 in (0.1, 0.35, 1.0):
            shifted = mse_by_estimator(w2)
            for name, mse in base.items():
                assert shifted[name] - mse == pytest.approx(w2 * slope, rel=1e-9), name


class TestFollowUpOracle:
    @pytest.fixture
    def spec(self):
        return DesignSpec(
            kind=DesignKind.SYSTEMATIC,
            n=6,
            k=8,
            nonresponse=NonResponseDesign(2.0),
            seed=42,
            replicates=100_000,
        )

    @pytest.mark.parametrize("alpha", [1.0, 2.0, 4.0])
    def test_simulated_mse_matches_exact_follow_up(self, systematic48, spec, alpha):
        estimator = factor_type_estimator(alpha)
        exact = OracleManager().enumerate_design(systematic48, spec, estimator)
        simulated = OracleManager(workers=4).monte_carlo(systematic48, spec, estimator)
        assert exact.exact
        assert abs(simulated.mse - exact.mse) < 3 * simulated.mse_std_error

    def test_closed_form_when_nonrespondents_agree(self, manager, systematic48, spec):
        responder = systematic48.column("responder")
        y = np.where(responder == 1, systematic48.y, 90.0)
        population = FinitePopulation(y=y, x=systematic48.x, responder=responder)
        exact = OracleManager().enumerate_design(population, spec, factor_type_estimator(4.0))
        nr = NonResponseSpec(float(np.mean(responder == 0)), 2.0, 0.0)
        expected = manager.factor_report(4.0, population_summary(manager, population, 6), nr)
        assert exact.bias == pytest.approx(0.0, abs=1e-9)
        assert exact.mse == pytest.approx(expected.mse1, rel=1e-10)


class TestIntraclassCorrelation:
    def test_systematic_variance_identity(self, manager, systematic48):
        n = 6
        rho = manager.intraclass_correlation(systematic48.y, n)
        spec = DesignSpec(kind=DesignKind.SYSTEMATIC, n=n)
        result = OracleManager().enumerate_design(systematic48, spec, lambda draw: draw.mean("y"))
        N = systematic48.N
        expected = (N - 1) / (n * N) * (1 + (n - 1) * rho) * systematic48.y.var(ddof=1)
        assert result.mse == pytest.approx(expected, rel=1e-10)

    def test_needs_whole_interval(self, manager, systematic48):
        with pytest.raises(DesignError):
            manager.intraclass_correlation(systematic48.y, 7)

    def test_constant_column(self, manager):
        with pytest.raises(DegenerateMomentError):
            manager.intraclass_correlation(np.ones(12), 4)

    def test_calibration_recovers_variance(self, manager, summary):
        nr = nonresponse(0.1)
        start = replace(summary, rho_y=0.0, rho_x=0.0, calibrated=False)
        calibrated = manager.calibrate_intraclass(start, nr, 1140.69)
        variance = manager.sys_base_variances(calibrated, nr)["var_y_star"]
        assert variance == pytest.approx(1140.69)
        assert calibrated.calibrated
        assert calibrated.rho_x == calibrated.rho_y


class TestSummaryValidation:
    def test_interval_must_divide(self):
        with pytest.raises(DesignError):
            SystematicSummary(N=50, n=8, mean_y=1, mean_x=1, s2_y=1, s2_x=1, rho=0.5, rho_y=0, rho_x=0)

    def test_intraclass_range(self):
        with pytest.raises(DomainError):
            SystematicSummary(N=48, n=8, mean_y=1, mean_x=1, s2_y=1, s2_x=1, rho=0.5, rho_y=-0.5, rho_x=0)

    def test_nonresponse_weight_range(self):
        with pytest.raises(DomainError):
            NonResponseSpec(1.5, 2.0, 1.0)

    @pytest.mark.parametrize("big_l", [1.0, 0.5])
    def test_follow_up_needs_l_above_one(self, big_l):
        with pytest.raises(DomainError, match="L must exceed 1"):
            NonResponseSpec(0.1, big_l, 1.0)

    def test_no_nonresponse_term_without_nonrespondents(self):
        assert NonResponseSpec(0.0, 3.0, 100.0).term(16) == 0.0
