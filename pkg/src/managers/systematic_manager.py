from dataclasses import replace
from math import isclose
from typing import Dict, List, Optional

import numpy as np
from numpy.polynomial import Polynomial

from models.report_model import EstimatorReport
from models.systematic_model import (
    AlphaOptimum,
    FactorTypeParams,
    NonResponseSpec,
    SystematicSummary,
)
from utils.efficiency import pre
from utils.errors import (
    DegenerateMomentError,
    DegenerateOptimumError,
    DesignError,
    DomainError,
    SingularFamilyError,
    SingularInputError,
)
from utils.logger import configure_logger

logger = configure_logger(__name__)

SYSTEMATIC_ESTIMATORS = ("mean", "ratio", "product", "dual", "regression")
IMAGINARY_TOLERANCE = 1e-9

# A, B and C of the factor-type family as polynomials in alpha
_A = Polynomial.fromroots([1.0, 2.0])
_B = Polynomial.fromroots([1.0, 4.0])
_C = Polynomial.fromroots([2.0, 3.0, 4.0])


class SystematicManager:
    """Business logic for systematic sampling with non-response on the study variable."""

    def sys_base_variances(self, summary: SystematicSummary, nr: NonResponseSpec) -> Dict[str, float]:
        """V(ybar*) with the Hansen-Hurwitz follow-up term, and V(xbar)."""
        base = summary.base
        return {
            "var_y_star": base * summary.design_effect_y * summary.s2_y + nr.term(summary.n),
            "var_xbar": base * summary.design_effect_x * summary.s2_x,
        }

    def sys_classical_report(
        self, summary: SystematicSummary, nr: NonResponseSpec
    ) -> List[EstimatorReport]:
        """Bias and MSE of the mean, ratio, product, dual-to-ratio and regression estimators."""
        if not summary.cv_x > 0:
            raise DegenerateMomentError("C_X must be positive")
        rows = {
            "mean": (0.0, self._mse_for_phi(summary, nr, 0.0)),
            "ratio": (self._bias_for(summary, 1.0, 1.0), self._mse_for_phi(summary, nr, 1.0)),
            "product": (self._bias_for(summary, -1.0, 0.0), self._mse_for_phi(summary, nr, -1.0)),
            "dual": (
                self._bias_for(summary, self._dual_phi(summary), 0.0),
                self._mse_for_phi(summary, nr, self._dual_phi(summary)),
            ),
            "regression": (None, self.regression_mse(summary, nr)),
        }
        baseline = rows["mean"][1]
        return [
            EstimatorReport(estimator=name, bias1=bias, mse1=mse, pre=pre(baseline, mse))
            for name, (bias, mse) in rows.items()
        ]

    def regression_mse(self, summary: SystematicSummary, nr: NonResponseSpec) -> float:
        """MSE of the regression estimator at the optimum slope."""
        scale = summary.base * summary.mean_y**2 * summary.design_effect_x
        return (
            scale * (summary.cv_y**2 - summary.k_const**2 * summary.cv_x**2) * summary.rho_star**2
            + nr.term(summary.n)
        )

    def factor_coefficients(self, alpha: float, f: float) -> FactorTypeParams:
        if not 0.0 < f < 1.0:
            raise DesignError(f"sampling fraction must lie in (0, 1), got {f}")
        return FactorTypeParams(alpha=alpha, f=f)

    def factor_point(
        self, ybar_star: float, xbar: float, pop_mean_x: float, alpha: float, f: float
    ) -> float:
        """Value of the factor-type estimator for one sample."""
        params = self.factor_coefficients(alpha, f)
        a, b, c = params.a, params.b, params.c
        denominator = (a + f * b) * pop_mean_x + c * xbar
        if denominator == 0.0:
            raise SingularInputError(f"factor-type denominator vanishes at alpha = {alpha}")
        return ybar_star * ((a + c) * pop_mean_x + f * b * xbar) / denominator

    def factor_report(
        self, alpha: float, summary: SystematicSummary, nr: NonResponseSpec
    ) -> EstimatorReport:
        params = self.factor_coefficients(alpha, summary.f)
        mse = self._mse_for_phi(summary, nr, params.phi)
        baseline = self._mse_for_phi(summary, nr, 0.0)
        return EstimatorReport(
            estimator=f"T(alpha={alpha:g})",
            bias1=self._bias_for(summary, params.phi, params.phi2),
            mse1=mse,
            pre=pre(baseline, mse),
        )

    def alpha_optimum(self, summary: SystematicSummary, nr: NonResponseSpec) -> AlphaOptimum:
        """Positive real roots of phi(alpha) = rho* K, the smallest one chosen.

        phi = (C - fB)/(A + fB + C), so the roots solve the cubic
        (1 - v) C - f (1 + v) B - v A = 0 with v = rho* K.
        """
        f = summary.f
        target = summary.rho_star * summary.k_const
        cubic = (1.0 - target) * _C - f * (1.0 + target) * _B - target * _A
        if cubic.degree() < 1 or np.allclose(cubic.coef, 0.0):
            raise DegenerateOptimumError(f"phi(alpha) = {target} does not determine alpha")
        all_roots = tuple(complex(root) for root in cubic.roots())
        candidates = []
        for root in all_roots:
            if abs(root.imag) >= IMAGINARY_TOLERANCE or root.real <= 0:
                continue
            try:
                self.factor_coefficients(root.real, f)
            except SingularFamilyError:
                logger.debug("root %g makes the family singular", root.real)
                continue
            candidates.append(root.real)
        if not candidates:
            listing = ", ".join(f"{root:.6g}" for root in all_roots)
            raise DegenerateOptimumError(
                f"phi(alpha) = {target:.6g} has no positive real root; roots: {listing}"
            )
        roots = tuple(sorted(candidates))
        chosen = roots[0]
        min_mse = self.factor_report(chosen, summary, nr).mse1
        regression = self.regression_mse(summary, nr)
        if not isclose(min_mse, regression, rel_tol=1e-9):
            logger.warning(
                "optimum MSE %.12g differs from the regression MSE %.12g", min_mse, regression
            )
        return AlphaOptimum(
            target=target,
            roots=roots,
            all_roots=all_roots,
            chosen=chosen,
            min_mse=min_mse,
            regression_mse=regression,
        )

    def intraclass_correlation(self, values: np.ndarray, n: int) -> float:
        """Intraclass correlation among units of the same systematic sample.

        Computed from the k possible systematic samples so that
        V(ybar_sys) = ((N-1)/(nN)) (1 + (n-1) rho) S^2 holds exactly.
        """
        values = np.asarray(values, dtype=float)
        N = values.size
        if n < 2 or N % n != 0:
            raise DesignError(f"systematic sampling needs N = n*k, got (N={N}, n={n})")
        k = N // n
        s2 = float(values.var(ddof=1))
        if s2 == 0.0:
            raise DegenerateMomentError("column is constant; intraclass correlation is undefined")
        sample_means = values.reshape(n, k).mean(axis=0)
        v_sys = float(np.mean((sample_means - values.mean()) ** 2))
        base = (N - 1) / (n * N)
        return (v_sys / (base * s2) - 1.0) / (n - 1)

    def calibrate_intraclass(
        self,
        summary: SystematicSummary,
        nr: NonResponseSpec,
        target_variance: float,
        tie_x: bool = True,
    ) -> SystematicSummary:
        """Back-solves rho_Y from one published V(ybar*); rho_X follows when ``tie_x``."""
        remainder = target_variance - nr.term(summary.n)
        if remainder <= 0:
            raise DomainError("target variance does not exceed the non-response term")
        rho = (remainder / (summary.base * summary.s2_y) - 1.0) / (summary.n - 1)
        logger.info("calibrated intraclass correlation %.6g", rho)
        return replace(
            summary, rho_y=rho, rho_x=rho if tie_x else summary.rho_x, calibrated=True
        )

    def sys_points(
        self,
        ybar_star: float,
        xbar: float,
        pop_mean_x: float,
        f: float,
        slope: Optional[float] = None,
        alpha: Optional[float] = None,
    ) -> Dict[str, float]:
        """Ratio, product, dual and regression values for one systematic sample."""
        if xbar == 0.0:
            raise SingularInputError("sample mean of x is zero")
        points = {
            "mean": ybar_star,
            "ratio": ybar_star * pop_mean_x / xbar,
            "product": ybar_star * xbar / pop_mean_x,
            "dual": ybar_star * (pop_mean_x - f * xbar) / ((1.0 - f) * pop_mean_x),
        }
        if slope is not None:
            points["regression"] = ybar_star + slope * (pop_mean_x - xbar)
        if alpha is not None:
            points[f"T(alpha={alpha:g})"] = self.factor_point(ybar_star, xbar, pop_mean_x, alpha, f)
        return points

    @staticmethod
    def _dual_phi(summary: SystematicSummary) -> float:
        return summary.f / (1.0 - summary.f)

    @staticmethod
    def _mse_for_phi(summary: SystematicSummary, nr: NonResponseSpec, phi: float) -> float:
        scale = summary.base * summary.mean_y**2 * summary.design_effect_x
        target = summary.rho_star * summary.k_const
        return (
            scale
            * (summary.rho_star**2 * summary.cv_y**2 + (phi**2 - 2 * phi * target) * summary.cv_x**2)
            + nr.term(summary.n)
        )

    @staticmethod
    def _bias_for(summary: SystematicSummary, phi: float, phi2: float) -> float:
        target = summary.rho_star * summary.k_const
        return (
            phi
            * summary.base
            * summary.mean_y
            * summary.design_effect_x
            * (phi2 - target)
            * summary.cv_x**2
        )
