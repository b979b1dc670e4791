from typing import Dict, List, Optional

import numpy as np

from models.attribute_model import (
    AttributeOptima,
    AttributeParams,
    FormulaVariant,
    OptimaMode,
    SampleSizeFit,
)
from models.population_model import AttributeSummary
from models.report_model import EstimatorReport
from utils.efficiency import pre
from utils.errors import DegenerateOptimumError, DesignError, DomainError, SingularInputError
from utils.logger import configure_logger
from utils.optimize import grid_minimize

logger = configure_logger(__name__)

ATTRIBUTE_ESTIMATORS = ("t1", "t2", "t3", "t4", "t5", "t6", "t7")
W1_GRID = (-2.0, 3.0)
GRID_POINTS = 10_001


class AttributeManager:
    """Business logic for mean estimators using two auxiliary attributes.

    ``t2_variant`` switches the C_p1 printed inside MSE(t2) to C_p2;
    ``t3_variant`` uses the 3/8 bias coefficient of the exponential ratio form.
    """

    def __init__(
        self,
        t2_variant: FormulaVariant = FormulaVariant.AS_PRINTED,
        t3_variant: FormulaVariant = FormulaVariant.AS_PRINTED,
    ) -> None:
        self.t2_variant = t2_variant
        self.t3_variant = t3_variant

    def attr_points(
        self,
        sample_mean_y: float,
        p1: float,
        p2: float,
        P1: float,
        P2: float,
        params: AttributeParams,
    ) -> Dict[str, float]:
        """Values of t1..t7 for one sample."""
        for label, value in (("P1", P1), ("P2", P2)):
            if not 0.0 < value < 1.0:
                raise DomainError(f"{label} must lie in (0, 1), got {value}")
        for label, value in (("p1", p1), ("p2", p2)):
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{label} must lie in [0, 1], got {value}")
        ybar = sample_mean_y
        ratio1 = P1 / self._nonzero(p1, "p1")
        ratio2 = P2 / self._nonzero(p2, "p2")
        shrink2 = np.exp((P2 - p2) / (P2 + p2))
        return {
            "t1": ybar * ratio1,
            "t2": ybar * ratio2,
            "t3": ybar * np.exp((P1 - p1) / (P1 + p1)),
            "t4": ybar * np.exp((p2 - P2) / (p2 + P2)),
            "t5": ybar * (params.w1 * ratio1 + params.w2 * ratio2),
            "t6": (params.k61 * ybar + params.k62 * (P1 - p1)) * shrink2,
            "t7": ybar + params.k71 * (P1 - p1) + params.k72 * (P2 - p2),
        }

    def attr_report(
        self,
        summary: AttributeSummary,
        f1: float,
        params: AttributeParams,
        mean_y: Optional[float] = None,
    ) -> List[EstimatorReport]:
        """First-order bias, MSE and PRE of t1..t7 against V(ybar) = f1 S_y^2."""
        if not f1 > 0:
            raise DesignError(f"f1 must be positive, got {f1}")
        Y = summary.mean_y if mean_y is None else mean_y
        k = self._constants(summary)
        cy2, cp1, cp2 = k["cy2"], k["cp1"], k["cp2"]
        kpb1, kpb2, kphi = k["kpb1"], k["kpb2"], k["kphi"]
        baseline = Y**2 * f1 * cy2
        t2_cp = cp2 if self.t2_variant is FormulaVariant.CORRECTED else cp1
        t3_bias = (
            cp1 * (3.0 / 8.0 - kpb1 / 2.0)
            if self.t3_variant is FormulaVariant.CORRECTED
            else cp1 / 2.0 * (0.25 - kpb1)
        )
        rows = {
            "t1": (Y * f1 * cp1 * (1 - kpb1), Y**2 * f1 * (cy2 + cp1 * (1 - 2 * kpb1))),
            "t2": (Y * f1 * kpb2 * cp2, Y**2 * f1 * (cy2 + t2_cp * (1 + 2 * kpb2))),
            "t3": (Y * f1 * t3_bias, Y**2 * f1 * (cy2 + cp1 * (0.25 - kpb1))),
            "t4": (Y * f1 * cp2 / 2 * (0.25 + kpb2), Y**2 * f1 * (cy2 + cp2 * (0.25 + kpb2))),
            "t5": (
                Y * f1 * (params.w1 * cp1 * (1 - kpb1) + params.w2 * cp2 * (1 - kpb2)),
                self._mse_t5(k, f1, Y, params.w1),
            ),
            "t6": (
                self._expectation_t6(summary, k, f1, Y, params) - Y,
                self._mse_t6(summary, k, f1, Y, params.k61, params.k62),
            ),
            "t7": (0.0, self._mse_t7(summary, k, f1, Y, params.k71, params.k72)),
        }
        reports = []
        for estimator in ATTRIBUTE_ESTIMATORS:
            bias, mse = rows[estimator]
            reports.append(
                EstimatorReport(
                    estimator=estimator,
                    bias1=float(bias),
                    mse1=float(mse),
                    pre=pre(baseline, float(mse)) if mse > 0 else None,
                    note="" if mse > 0 else "non-positive first-order MSE",
                )
            )
        return reports

    def attr_optima(
        self,
        summary: AttributeSummary,
        f1: float,
        mode: OptimaMode = OptimaMode.AS_PRINTED,
        mean_y: Optional[float] = None,
    ) -> AttributeOptima:
        """Optimal w1, (K61, K62) and (K71, K72) with the MSE each attains."""
        Y = summary.mean_y if mean_y is None else mean_y
        k = self._constants(summary)
        cp1, cp2, kpb1, kpb2, kphi = k["cp1"], k["cp2"], k["kpb1"], k["kpb2"], k["kphi"]
        a1, a2, a3 = self._a_constants(k, f1)
        if mode is OptimaMode.AS_PRINTED:
            denominator = cp1 - kphi * cp2
            if denominator == 0:
                raise DegenerateOptimumError("printed w1* has a zero denominator")
            w1 = (kpb1 * cp1 - kphi * cp2) / denominator
            det6 = a1 * a2 - a3**2
            det7 = cp1 - kphi**2 * cp2
            if det6 == 0 or det7 == 0:
                raise DegenerateOptimumError("printed K-optima have a zero denominator")
            k61, k62 = a2 / det6, Y * a3 / (summary.p1 * det6)
            k71 = Y / summary.p1 * (kpb1 * cp1 - kpb2 * kphi * cp2) / det7
            k72 = Y / summary.p2 * (kpb2 * cp1 - kpb1 * kphi * cp1) / det7
            grid = {}
        else:
            w1 = self._minimizing_w1(k)
            k61, k62 = self._solve(
                np.array([[Y**2 * a1, -summary.p1 * Y * a3], [-summary.p1 * Y * a3, summary.p1**2 * a2]]),
                np.array([Y**2, 0.0]),
                "t6",
            )
            u1, u2 = self._solve(
                np.array([[cp1, kphi * cp2], [kphi * cp2, cp2]]),
                np.array([kpb1 * cp1, kpb2 * cp2]),
                "t7",
            )
            k71, k72 = u1 * Y / summary.p1, u2 * Y / summary.p2
            result = grid_minimize(
                lambda w: self._mse_t5(k, f1, Y, w), *W1_GRID, points=GRID_POINTS
            )
            grid = {"t5": result.minimum}
            if result.minimum < self._mse_t5(k, f1, Y, w1) * (1 - 1e-9):
                logger.warning("grid beats the minimizing w1 for t5")
        params = AttributeParams.with_w1(w1, k61=k61, k62=k62, k71=k71, k72=k72)
        mse = {
            "t5": float(self._mse_t5(k, f1, Y, w1)),
            "t6": float(self._mse_t6(summary, k, f1, Y, k61, k62)),
            "t7": float(self._mse_t7(summary, k, f1, Y, k71, k72)),
        }
        logger.debug("%s optima: %s", mode.value, params)
        return AttributeOptima(mode=mode, params=params, mse=mse, grid_mse=grid)

    def best_fit_sample_size(
        self,
        summary: AttributeSummary,
        target_pre: float,
        estimator: str = "t6",
        mode: OptimaMode = OptimaMode.AS_PRINTED,
    ) -> SampleSizeFit:
        """Sweeps n over [2, N-1] for the optimized estimator's PRE closest to a target."""
        best = None
        for n in range(2, summary.N):
            f1 = 1.0 / n - 1.0 / summary.N
            optima = self.attr_optima(summary, f1, mode)
            baseline = summary.mean_y**2 * f1 * (summary.cv_y**2)
            mse = optima.mse[estimator]
            if mse <= 0:
                continue
            value = pre(baseline, mse)
            if best is None or abs(value - target_pre) < abs(best.pre - target_pre):
                best = SampleSizeFit(estimator=estimator, n=n, pre=value, target=target_pre)
        if best is None:
            raise DegenerateOptimumError(f"{estimator} has no positive MSE for any n")
        return best

    @staticmethod
    def _constants(summary: AttributeSummary) -> Dict[str, float]:
        return {
            "cy2": summary.cv_y**2,
            "cp1": summary.cv_p1**2,
            "cp2": summary.cv_p2**2,
            "kpb1": summary.k_pb1,
            "kpb2": summary.k_pb2,
            "kphi": summary.k_phi,
        }

    @staticmethod
    def _a_constants(k: Dict[str, float], f1: float):
        a1 = 1.0 + f1 * (k["cy2"] + k["cp2"] * (0.25 - k["kpb2"]))
        a2 = f1 * k["cp1"]
        a3 = f1 * (k["kpb1"] * k["cp1"] - 0.5 * k["kphi"] * k["cp2"])
        return a1, a2, a3

    @staticmethod
    def _mse_t5(k: Dict[str, float], f1: float, Y: float, w1):
        w2 = 1.0 - w1
        return Y**2 * f1 * (
            k["cy2"]
            + w1**2 * k["cp1"]
            + w2**2 * k["cp2"]
            - 2 * w1 * k["kpb1"] * k["cp1"]
            - 2 * w2 * k["kpb2"] * k["cp2"]
            + 2 * w1 * w2 * k["kphi"] * k["cp2"]
        )

    def _mse_t6(self, summary, k, f1, Y, k61, k62):
        a1, a2, a3 = self._a_constants(k, f1)
        P1 = summary.p1
        return (
            k61**2 * Y**2 * a1
            + k62**2 * P1**2 * a2
            - 2 * k61 * k62 * P1 * Y * a3
            + (1 - 2 * k61) * Y**2
        )

    @staticmethod
    def _expectation_t6(summary, k, f1, Y, params: AttributeParams) -> float:
        return params.k61 * Y * (
            1 + f1 * k["cp2"] * (3.0 / 8.0 - 0.5 * k["kpb2"])
        ) + 0.5 * params.k62 * summary.p1 * f1 * k["kphi"] * k["cp2"]

    @staticmethod
    def _mse_t7(summary, k, f1, Y, k71, k72):
        P1, P2 = summary.p1, summary.p2
        return (
            Y**2 * f1 * k["cy2"]
            + k71**2 * P1**2 * f1 * k["cp1"]
            + k72**2 * P2**2 * f1 * k["cp2"]
            - 2 * k71 * P1 * Y * f1 * k["kpb1"] * k["cp1"]
            - 2 * k72 * P2 * Y * f1 * k["kpb2"] * k["cp2"]
            + 2 * k71 * k72 * P1 * P2 * f1 * k["kphi"] * k["cp2"]
        )

    @staticmethod
    def _minimizing_w1(k: Dict[str, float]) -> float:
        curvature = k["cp1"] + k["cp2"] - 2 * k["kphi"] * k["cp2"]
        if not curvature > 0:
            raise DegenerateOptimumError("MSE(t5) is not convex in w1")
        return (k["cp2"] + k["kpb1"] * k["cp1"] - k["kpb2"] * k["cp2"] - k["kphi"] * k["cp2"]) / curvature

    @staticmethod
    def _solve(matrix: np.ndarray, rhs: np.ndarray, label: str):
        if np.any(np.linalg.eigvalsh(matrix) <= 0):
            raise DegenerateOptimumError(f"{label}: MSE is not positive definite in its constants")
        solution = np.linalg.solve(matrix, rhs)
        return float(solution[0]), float(solution[1])

    @staticmethod
    def _nonzero(value: float, label: str) -> float:
        if value == 0:
            raise SingularInputError(f"{label} is zero")
        return value
