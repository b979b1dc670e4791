import numpy as np
import pytest

from datasets.builtin import PUBLISHED_TABLES
from managers.attribute_manager import ATTRIBUTE_ESTIMATORS, AttributeManager
from managers.report_manager import pakrice_summary
from models.attribute_model import AttributeParams, FormulaVariant, OptimaMode
from utils.errors import DesignError, DomainError, SingularInputError

PRINTED = PUBLISHED_TABLES["ch2-table4.1"]


@pytest.fixture
def summary():
    return pakrice_summary()


@pytest.fixture
def manager():
    return AttributeManager()


def f1_for(n, N=73):
    return 1.0 / n - 1.0 / N


class TestAttributeReport:
    @pytest.mark.parametrize("n", [10, 20, 40])
    @pytest.mark.parametrize("estimator, tolerance", [("t1", 0.005), ("t2", 0.01), ("t4", 0.005)])
    def test_efficiency_does_not_depend_on_n(self, manager, summary, n, estimator, tolerance):
        params = manager.attr_optima(summary, f1_for(n)).params
        reports = {r.estimator: r for r in manager.attr_report(summary, f1_for(n), params)}
        assert reports[estimator].pre == pytest.approx(PRINTED[estimator], rel=tolerance)

    def test_every_estimator_reported(self, manager, summary):
        reports = manager.attr_report(summary, f1_for(20), AttributeParams())
        assert [r.estimator for r in reports] == list(ATTRIBUTE_ESTIMATORS)

    def test_regression_type_is_unbiased(self, manager, summary):
        reports = {r.estimator: r for r in manager.attr_report(summary, f1_for(20), AttributeParams())}
        assert reports["t7"].bias1 == 0.0

    def test_corrected_t2_uses_second_attribute(self, summary):
        f1 = f1_for(20)
        printed = AttributeManager().attr_report(summary, f1, AttributeParams())[1]
        corrected = AttributeManager(t2_variant=FormulaVariant.CORRECTED).attr_report(
            summary, f1, AttributeParams()
        )[1]
        assert printed.mse1 != pytest.approx(corrected.mse1)
        assert printed.bias1 == pytest.approx(corrected.bias1)

    def test_corrected_t3_bias(self, summary):
        f1 = f1_for(20)
        corrected = AttributeManager(t3_variant=FormulaVariant.CORRECTED)
        report = corrected.attr_report(summary, f1, AttributeParams())[2]
        cp1 = summary.cv_p1**2
        assert report.bias1 == pytest.approx(summary.mean_y * f1 * cp1 * (3 / 8 - summary.k_pb1 / 2))

    def test_needs_positive_f1(self, manager, summary):
        with pytest.raises(DesignError):
            manager.attr_report(summary, 0.0, AttributeParams())


class TestAttributeOptima:
    def test_minimizing_w1_beats_printed(self, manager, summary):
        f1 = f1_for(20)
        printed = manager.attr_optima(summary, f1, OptimaMode.AS_PRINTED)
        minimizing = manager.attr_optima(summary, f1, OptimaMode.MINIMIZING)
        assert minimizing.mse["t5"] <= printed.mse["t5"] * (1 + 1e-12)
        assert minimizing.grid_mse["t5"] == pytest.approx(minimizing.mse["t5"], rel=1e-9)

    def test_minimizing_constants_beat_printed(self, manager, summary):
        f1 = f1_for(20)
        printed = manager.attr_optima(summary, f1, OptimaMode.AS_PRINTED)
        minimizing = manager.attr_optima(summary, f1, OptimaMode.MINIMIZING)
        assert minimizing.mse["t6"] <= printed.mse["t6"] * (1 + 1e-12)
        assert minimizing.mse["t7"] <= printed.mse["t7"] * (1 + 1e-12)

    def test_minimizing_t7_is_stationary(self, manager, summary):
        f1 = f1_for(20)
        optima = manager.attr_optima(summary, f1, OptimaMode.MINIMIZING)
        params = optima.params
        k = manager._constants(summary)
        best = optima.mse["t7"]
        for dk71, dk72 in ((1e-3, 0.0), (-1e-3, 0.0), (0.0, 1e-3), (0.0, -1e-3)):
            nearby = manager._mse_t7(summary, k, f1, summary.mean_y, params.k71 + dk71, params.k72 + dk72)
            assert nearby >= best

    def test_weights_sum_to_one(self, manager, summary):
        params = manager.attr_optima(summary, f1_for(20)).params
        assert params.w1 + params.w2 == pytest.approx(1.0)
        with pytest.raises(DomainError):
            AttributeParams(w1=0.7, w2=0.7)


class TestBestFitSampleSize:
    def test_fit_to_printed_t6(self, manager, summary):
        fit = manager.best_fit_sample_size(summary, PRINTED["t6"])
        assert 2 <= fit.n < summary.N
        assert abs(fit.rel_residual) < 0.01
        neighbours = []
        for n in (fit.n - 1, fit.n + 1):
            if 2 <= n < summary.N:
                f1 = f1_for(n)
                optima = manager.attr_optima(summary, f1)
                baseline = summary.mean_y**2 * f1 * summary.cv_y**2
                neighbours.append(abs(100 * baseline / optima.mse["t6"] - PRINTED["t6"]))
        assert all(abs(fit.pre - PRINTED["t6"]) <= other for other in neighbours)


class TestAttributePoints:
    def test_values(self, manager):
        params = AttributeParams.with_w1(0.3, k61=1.0, k62=0.0, k71=2.0, k72=-1.0)
        points = manager.attr_points(50.0, 0.4, 0.3, 0.5, 0.25, params)
        assert points["t1"] == pytest.approx(50.0 * 0.5 / 0.4)
        assert points["t2"] == pytest.approx(50.0 * 0.25 / 0.3)
        assert points["t3"] == pytest.approx(50.0 * np.exp(0.1 / 0.9))
        assert points["t5"] == pytest.approx(0.3 * points["t1"] + 0.7 * points["t2"])
        assert points["t7"] == pytest.approx(50.0 + 2.0 * 0.1 + 0.05)

    def test_proportion_outside_unit_interval(self, manager):
        with pytest.raises(DomainError):
            manager.attr_points(50.0, 0.4, 0.3, 1.0, 0.25, AttributeParams())

    def test_zero_sample_proportion(self, manager):
        with pytest.raises(SingularInputError):
            manager.attr_points(50.0, 0.0, 0.3, 0.5, 0.25, AttributeParams())
