from typing import Dict, Optional

import numpy as np

from managers.moment_manager import MomentManager
from models.mean_family_model import (
    ExpansionMode,
    FamilyOptimum,
    MeanEstimator,
    MeanFamilyParams,
    TUNING_PARAMETER,
)
from models.moment_model import (
    FIRST_ORDER_KEYS,
    SECOND_ORDER_KEYS,
    ExpansionMoments,
    MomentTable,
    StratifiedPopulation,
)
from models.population_model import DesignCoefficients
from models.report_model import EstimatorReport
from utils import series
from utils.errors import (
    DegenerateOptimumError,
    DesignError,
    DomainError,
    SingularInputError,
)
from utils.logger import configure_logger
from utils.optimize import grid_minimize, search_interval

logger = configure_logger(__name__)

OPTIMUM_GRID_POINTS = 10_001


def _power(base: float, exponent: float, label: str) -> float:
    if base < 0 and not float(exponent).is_integer():
        raise DomainError(f"{label}: fractional power {exponent} of negative base {base}")
    if base == 0 and exponent < 0:
        raise SingularInputError(f"{label}: zero base raised to negative power {exponent}")
    return base**exponent


class MeanFamilyManager:
    """Business logic for the ratio-type mean estimators t1..t5.

    ``mode`` selects the printed bias and MSE expressions or those derived
    from a fourth-order series expansion of each estimator.
    """

    def __init__(self, mode: ExpansionMode = ExpansionMode.AS_PRINTED) -> None:
        self.mode = mode
        self.moments = MomentManager()

    def point_estimate(
        self,
        sample_mean_y: float,
        sample_mean_x: float,
        pop_mean_x: float,
        params: MeanFamilyParams,
    ) -> float:
        """Value of the selected estimator for one sample."""
        if pop_mean_x <= 0 or sample_mean_x <= 0:
            raise DomainError(
                f"mean estimators need positive x means, got xbar={sample_mean_x}, X={pop_mean_x}"
            )
        ybar, xbar, X = sample_mean_y, sample_mean_x, pop_mean_x
        estimator = params.estimator
        if estimator is MeanEstimator.T1:
            return (1.0 - params.alpha) * ybar + params.alpha * ybar * X / xbar
        if estimator is MeanEstimator.T2:
            denominator = params.beta * xbar + (1.0 - params.beta) * X
            if denominator == 0:
                raise SingularInputError("t2: beta*xbar + (1-beta)*X vanished")
            return ybar * _power(X / denominator, params.g_exp, "t2")
        if estimator is MeanEstimator.T3:
            return ybar * (2.0 - (xbar / X) ** params.w)
        if estimator is MeanEstimator.T4:
            numerator = xbar + params.a * (X - xbar)
            denominator = xbar + params.b * (X - xbar)
            if denominator == 0:
                raise SingularInputError("t4: xbar + b(X - xbar) vanished")
            return ybar * _power(numerator / denominator, params.p, "t4")
        shift = np.exp(params.delta * (xbar - X) / (xbar + X))
        return ybar * (2.0 - (xbar / X) ** params.lambda_exp * shift)

    def expansion_coefficients(self, params: MeanFamilyParams) -> np.ndarray:
        """Series h(e1) with t = Y (1 + e0) h(e1), truncated at e1^4."""
        estimator = params.estimator
        if estimator is MeanEstimator.T1:
            inverse = series.binomial(-1.0)
            return series.constant(1.0 - params.alpha) + params.alpha * inverse
        if estimator is MeanEstimator.T2:
            return series.binomial(-params.g_exp, params.beta)
        if estimator is MeanEstimator.T3:
            return series.constant(2.0) - series.binomial(params.w)
        if estimator is MeanEstimator.T4:
            return series.multiply(
                series.binomial(params.p, 1.0 - params.a),
                series.binomial(-params.p, 1.0 - params.b),
            )
        shift = series.exp(params.delta * series.half_ratio())
        return series.constant(2.0) - series.multiply(series.binomial(params.lambda_exp), shift)

    def first_order_report(
        self,
        moments: MomentTable,
        coeffs: DesignCoefficients,
        mean_y: float,
        params: MeanFamilyParams,
    ) -> EstimatorReport:
        """First-order bias and MSE under SRSWOR."""
        moments.require([(2, 0), (0, 2), (1, 1)])
        em = self.moments.expansion_moments(moments, coeffs)
        return self.report_from_expansion(em, mean_y, params, order=1)

    def second_order_report(
        self,
        moments: MomentTable,
        coeffs: DesignCoefficients,
        mean_y: float,
        params: MeanFamilyParams,
    ) -> EstimatorReport:
        """First- and second-order bias and MSE under SRSWOR."""
        if coeffs.l3 is None:
            raise DesignError(f"second-order terms need N >= 4, got N={coeffs.N}")
        moments.require([(2, 0), (0, 2), (1, 1), (3, 0), (2, 1), (1, 2), (4, 0), (3, 1), (2, 2)])
        em = self.moments.expansion_moments(moments, coeffs)
        return self.report_from_expansion(em, mean_y, params, order=2)

    def stratified_report(
        self,
        strat: StratifiedPopulation,
        mean_y: float,
        params: MeanFamilyParams,
        order: int = 1,
    ) -> EstimatorReport:
        """Bias and MSE under stratified SRSWOR with V_rs in place of L_i C_pq."""
        em = self.moments.stratified_expansion_moments(strat)
        return self.report_from_expansion(em, mean_y, params, order=order)

    def report_from_expansion(
        self,
        em: ExpansionMoments,
        mean_y: float,
        params: MeanFamilyParams,
        order: int = 2,
        point: Optional[float] = None,
    ) -> EstimatorReport:
        if order not in (1, 2):
            raise DesignError(f"order must be 1 or 2, got {order}")
        em.require(FIRST_ORDER_KEYS if order == 1 else SECOND_ORDER_KEYS)
        first = em.first_order_only()
        bias1, mse1 = self._relative_bias_mse(first, params)
        baseline = em.get(2, 0)
        report = {
            "estimator": params.estimator.value,
            "point": point,
            "bias1": mean_y * bias1,
            "mse1": mean_y**2 * mse1,
            "pre": 100.0 * baseline / mse1 if mse1 > 0 else None,
        }
        if order == 2:
            bias2, mse2 = self._relative_bias_mse(em, params)
            report["bias2"] = mean_y * bias2
            report["mse2"] = mean_y**2 * mse2
        return EstimatorReport(**report, note=f"{self.mode.value} ({em.design})")

    def family_optimum(
        self,
        moments: MomentTable,
        coeffs: DesignCoefficients,
        estimator: MeanEstimator,
        mean_y: float = 1.0,
        base: Optional[MeanFamilyParams] = None,
        confirm: bool = True,
    ) -> FamilyOptimum:
        """Tuning parameter minimizing the first-order MSE, grid-confirmed when ``confirm``."""
        em = self.moments.expansion_moments(moments, coeffs).first_order_only()
        return self.optimum_from_expansion(em, estimator, mean_y, base, confirm)

    def optimum_from_expansion(
        self,
        em: ExpansionMoments,
        estimator: MeanEstimator,
        mean_y: float = 1.0,
        base: Optional[MeanFamilyParams] = None,
        confirm: bool = True,
    ) -> FamilyOptimum:
        params = base or MeanFamilyParams(estimator)
        if params.estimator is not estimator:
            raise DesignError(f"base parameters are for {params.estimator.value}, not {estimator.value}")
        first = em.first_order_only()
        var_x, cov = first.get(0, 2), first.get(1, 1)
        if var_x <= 0:
            raise DegenerateOptimumError("E[e1^2] is zero; the first-order MSE is flat")
        value = self._tuning_for_slope(params, cov / var_x)
        optimal = params.tuned(value)
        _, mse1 = self._relative_bias_mse(first, optimal)
        if not confirm:
            return FamilyOptimum(
                estimator=estimator,
                parameter=TUNING_PARAMETER[estimator],
                value=value,
                mse1=mean_y**2 * mse1,
            )

        def objective(values: np.ndarray) -> np.ndarray:
            return np.array(
                [self._relative_bias_mse(first, params.tuned(v))[1] for v in values]
            )

        lower, upper = search_interval(value)
        grid = grid_minimize(objective, lower, upper, points=OPTIMUM_GRID_POINTS)
        logger.debug(
            "%s optimum %s=%.6g: closed form %.12g, grid %.12g",
            estimator.value,
            TUNING_PARAMETER[estimator],
            value,
            mse1,
            grid.minimum,
        )
        if grid.minimum < mse1 * (1.0 - 1e-9):
            logger.warning(
                "%s: grid minimum %.12g beats the closed-form optimum %.12g",
                estimator.value,
                grid.minimum,
                mse1,
            )
        return FamilyOptimum(
            estimator=estimator,
            parameter=TUNING_PARAMETER[estimator],
            value=value,
            mse1=mean_y**2 * mse1,
            grid_mse1=mean_y**2 * grid.minimum,
        )

    def _tuning_for_slope(self, params: MeanFamilyParams, slope: float) -> float:
        """Parameter value whose first-order coefficient h1 equals -slope."""
        estimator = params.estimator
        if estimator is MeanEstimator.T1 or estimator is MeanEstimator.T3:
            return slope
        if estimator is MeanEstimator.T2:
            if params.g_exp == 0:
                raise DegenerateOptimumError("t2 with g = 0 does not depend on beta")
            return slope / params.g_exp
        if estimator is MeanEstimator.T4:
            if params.b == params.a:
                raise DegenerateOptimumError("t4 with a = b does not depend on p")
            sign = 1.0 if self.mode is ExpansionMode.AS_PRINTED else -1.0
            return sign * slope / (params.b - params.a)
        return slope - params.delta / 2.0

    def _relative_bias_mse(self, em: ExpansionMoments, params: MeanFamilyParams):
        if self.mode is ExpansionMode.DERIVED:
            return self._derived(em, params)
        return self._printed(em, params)

    def _derived(self, em: ExpansionMoments, params: MeanFamilyParams):
        h = self.expansion_coefficients(params)
        h1, h2, h3, h4 = h[1], h[2], h[3], h[4]
        E = {key: em.values.get(key, 0.0) for key in SECOND_ORDER_KEYS}
        bias = (
            h1 * E[(1, 1)]
            + h2 * E[(0, 2)]
            + h2 * E[(1, 2)]
            + h3 * E[(0, 3)]
            + h3 * E[(1, 3)]
            + h4 * E[(0, 4)]
        )
        mse = (
            E[(2, 0)]
            + h1**2 * E[(0, 2)]
            + 2 * h1 * E[(1, 1)]
            + 2 * h1 * h2 * E[(0, 3)]
            + (2 * h2 + 2 * h1**2) * E[(1, 2)]
            + 2 * h1 * E[(2, 1)]
            + (h2**2 + 2 * h1 * h3) * E[(0, 4)]
            + (2 * h3 + 4 * h1 * h2) * E[(1, 3)]
            + (h1**2 + 2 * h2) * E[(2, 2)]
        )
        return bias, mse

    def _printed(self, em: ExpansionMoments, params: MeanFamilyParams):
        values: Dict = {key: em.values.get(key, 0.0) for key in SECOND_ORDER_KEYS}

        def m(p: int, q: int) -> float:
            return values[(q, p)]

        estimator = params.estimator
        if estimator is MeanEstimator.T1:
            a = params.alpha
            bias = (
                a / 2 * m(2, 0) - a * m(1, 1) - a / 6 * m(3, 0) + a * m(2, 1)
                - a / 6 * m(3, 1) + a / 24 * m(4, 0)
            )
            mse = (
                m(0, 2) + a**2 * m(2, 0) - 2 * a * m(1, 1) - a**2 * m(3, 0)
                + (2 * a**2 + a) * m(2, 1) - 2 * a**2 * m(3, 1) + a * (a + 1) * m(2, 2)
                + 5 / 24 * a**2 * m(4, 0)
            )
        elif estimator is MeanEstimator.T2:
            g, b = params.g_exp, params.beta
            c2 = g * (g + 1) / 2
            c3 = g * (g + 1) * (g + 2) / 6
            c4 = g * (g + 1) * (g + 2) * (g + 3) / 24
            bias = (
                c2 * b**2 * m(2, 0) - g * b * m(1, 1) - c2 * b**2 * m(2, 1)
                - c3 * b**3 * m(3, 0) - c3 * b**3 * m(3, 1) + c4 * b**4 * m(4, 0)
            )
            mse = (
                m(0, 2) + g**2 * b**2 * m(2, 0) - 2 * b * g * m(1, 1)
                - b**3 * g**2 * (g + 1) * m(3, 0) + g * (3 * g + 1) * b**2 * m(2, 1)
                - 2 * b * g * m(1, 2) - (7 * g**3 + 9 * g**2 + 2 * g) / 3 * b**3 * m(3, 1)
                + g * (2 * g + 1) * b**2 * m(2, 2)
                + (2 * g**3 + 9 * g**2 + 10 * g + 3) / 6 * b**4 * m(4, 0)
            )
        elif estimator is MeanEstimator.T3:
            w = params.w
            c3 = w * (w - 1) * (w - 2) / 6
            bias = (
                -w * (w - 1) / 2 * m(2, 0) - w * m(1, 1) - w * (w - 1) / 2 * m(2, 1)
                - c3 * (m(3, 0) + m(3, 1)) - w * (w - 1) * (w - 2) * (w - 3) / 24 * m(4, 0)
            )
            mse = (
                m(0, 2) + w**2 * m(2, 0) - 2 * w * m(1, 1) - w**2 * (w - 1) * m(3, 0)
                + w * (w + 1) * m(2, 1) - 2 * w * m(1, 2)
                + (5 * w**3 - 3 * w**2 - 2 * w) / 3 * m(3, 1) + w * m(2, 2)
                + (7 * w**4 - 18 * w**3 + 11 * w**2) / 24 * m(4, 0)
            )
        elif estimator is MeanEstimator.T4:
            b, D, D1, D2, D3 = params.b, params.d, params.d1, params.d2, params.d3
            bias = (
                (b * D + D1) * m(2, 0) - D * m(1, 1) + (b * D + D1) / 2 * m(2, 1)
                - (b**2 * D + 2 * b * D1 + D2) / 2 * m(3, 0)
                - (b**2 * D + 2 * b * D1) * m(3, 1)
                + (b**3 * D + 3 * b**2 * D1 + 3 * b * D2 + D3) / 2 * m(4, 0)
            )
            mse = (
                m(0, 2) + D**2 * m(2, 0) - 2 * D * m(1, 1) - 4 * D * D1 * m(3, 0)
                + (2 * b * D + 2 * D1 + 2 * D**2) * m(2, 1) - 2 * D * m(1, 2)
                + (2 * D**2 + 2 * b**2 * D + 2 * D * D1 + 4 * b * D1 + 4 * b * D**2) * m(3, 1)
                + (D**2 + 2 * D1 + 2 * b * D) * m(2, 2)
                + (3 * b**2 * D**2 + D1**2 + 2 * D * D2 + 12 * b * D * D1) * m(4, 0)
            )
        else:
            k, M, Nc = params.k, params.m_const, params.n_const
            bias = (
                -k * (k - 1) / 2 * m(2, 0) - k * m(1, 1) - k * (k - 1) / 2 * m(2, 1)
                - M * m(3, 0) - M * m(3, 1) - Nc * m(4, 0)
            )
            mse = (
                m(0, 2) + k**2 * m(2, 0) - 2 * k * m(1, 1) + k * m(2, 1) - 2 * k * m(1, 2)
                + k**2 * (k - 1) * m(3, 0) + 2 * k**2 * (k - 1) * m(3, 1) + k * m(2, 2)
                + (k**2 - k) ** 2 / 4 * m(4, 0)
            )
        return bias, mse
