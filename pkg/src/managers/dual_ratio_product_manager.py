from math import inf, isfinite
from typing import Dict, List, Optional, Sequence

from models.dual_model import DualPRParams, EfficiencyCondition, QuadraticSummary, SampleMeans
from models.population_model import DesignCoefficients, SummaryStats
from models.report_model import EstimatorReport
from utils.efficiency import pre
from utils.errors import DegenerateOptimumError, DomainError, IncompleteInputError, SingularInputError
from utils.logger import configure_logger

logger = configure_logger(__name__)

CLASSICAL_ESTIMATORS = ("ybar", "R", "P", "S", "R*", "P*", "SE", "ST")

_NEEDS = {
    "ybar": (),
    "R": ("mean_x", "var_x", "cov_yx"),
    "P": ("mean_z", "var_z", "cov_yz"),
    "S": ("mean_x", "mean_z", "var_x", "var_z", "cov_yx", "cov_yz", "cov_zx"),
    "R*": ("mean_x", "var_x", "cov_yx"),
    "P*": ("mean_z", "var_z", "cov_yz"),
    "SE": ("mean_x", "mean_z", "var_x", "var_z", "cov_yx", "cov_yz", "cov_zx"),
    "ST": ("mean_x", "var_x", "cov_yx", "rho_yx"),
    "PR": ("mean_x", "mean_z", "var_x", "var_z", "cov_yx", "cov_yz", "cov_zx"),
}


def _require(stats: SummaryStats, estimator: str) -> None:
    missing = [name for name in _NEEDS[estimator] if getattr(stats, name) is None]
    if missing:
        raise IncompleteInputError(f"{estimator} needs {', '.join(missing)}")
    for name in ("mean_x", "mean_z"):
        if name in _NEEDS[estimator] and getattr(stats, name) == 0:
            raise SingularInputError(f"{estimator} divides by {name} = 0")


def dual_transform(xbar: float, pop_mean_x: float, g: float) -> float:
    """(1 + g) X - g xbar."""
    if not g > 0:
        raise DomainError(f"g must be positive, got {g}")
    return (1.0 + g) * pop_mean_x - g * xbar


class DualRatioProductManager:
    """Business logic for the dual ratio-cum-product estimator and its comparators."""

    def constants(self, stats: SummaryStats) -> Dict[str, float]:
        """R1, R2, C and D of the quadratic MSE."""
        _require(stats, "PR")
        r1, r2 = stats.mean_y / stats.mean_x, stats.mean_y / stats.mean_z
        c = r1**2 * stats.var_x - 2 * r1 * r2 * stats.cov_zx + r2**2 * stats.var_z
        d = r1 * stats.cov_yx - r2 * stats.cov_yz
        return {"r1": r1, "r2": r2, "c": c, "d": d}

    def classical_mse(
        self, stats: SummaryStats, coeffs: DesignCoefficients, estimator: str
    ) -> float:
        """First-order MSE of one comparator."""
        _require(stats, estimator)
        lam, g, s2 = coeffs.lam, coeffs.g, stats.var_y
        if estimator == "ybar":
            return lam * s2
        if estimator in ("R", "R*"):
            h = 1.0 if estimator == "R" else g
            r1 = stats.mean_y / stats.mean_x
            return lam * (s2 + h**2 * r1**2 * stats.var_x - 2 * h * r1 * stats.cov_yx)
        if estimator in ("P", "P*"):
            h = 1.0 if estimator == "P" else g
            r2 = stats.mean_y / stats.mean_z
            return lam * (s2 + h**2 * r2**2 * stats.var_z + 2 * h * r2 * stats.cov_yz)
        if estimator in ("S", "SE"):
            k = self.constants(stats)
            if estimator == "S":
                return lam * (s2 - 2 * k["d"] + k["c"])
            return lam * (s2 + g**2 * k["c"] - 2 * g * k["d"])
        if estimator == "ST":
            return lam * s2 * (1.0 - stats.rho_yx**2)
        raise IncompleteInputError(f"unknown comparator '{estimator}'")

    def classical_point(
        self, stats: SummaryStats, coeffs: DesignCoefficients, estimator: str, sample: SampleMeans
    ) -> float:
        """Value of one comparator for a sample."""
        _require(stats, estimator)
        for column in ("x", "z"):
            if f"mean_{column}" in _NEEDS[estimator] and getattr(sample, column) is None:
                raise IncompleteInputError(f"{estimator} needs the sample mean of {column}")
        g, y = coeffs.g, sample.y
        X, Z = stats.mean_x, stats.mean_z
        if estimator == "ybar":
            return y
        x_star = dual_transform(sample.x, X, g) if sample.x is not None else None
        z_star = dual_transform(sample.z, Z, g) if sample.z is not None else None
        if estimator == "R":
            return y * X / self._nonzero(sample.x, "xbar")
        if estimator == "P":
            return y * sample.z / Z
        if estimator == "S":
            return y * X / self._nonzero(sample.x, "xbar") * sample.z / Z
        if estimator == "R*":
            return y * x_star / X
        if estimator == "P*":
            return y * Z / self._nonzero(z_star, "z*")
        if estimator == "SE":
            return y * x_star / X * Z / self._nonzero(z_star, "z*")
        alpha = self.st_weight(stats, coeffs)
        return y * (alpha * X / self._nonzero(sample.x, "xbar") + (1.0 - alpha) * x_star / X)

    def st_weight(self, stats: SummaryStats, coeffs: DesignCoefficients) -> float:
        """Mixing weight (K - g)/(1 - g) of the ratio-cum-dual estimator, K = rho Cy/Cx."""
        _require(stats, "ST")
        if coeffs.g == 1.0:
            raise DegenerateOptimumError("ratio-cum-dual weight is undefined for g = 1 (N = 2n)")
        k = stats.cov_yx * stats.mean_x / (stats.var_x * stats.mean_y)
        return (k - coeffs.g) / (1.0 - coeffs.g)

    def classical_report(
        self,
        stats: SummaryStats,
        coeffs: DesignCoefficients,
        sample: Optional[SampleMeans] = None,
        estimators: Sequence[str] = CLASSICAL_ESTIMATORS,
    ) -> List[EstimatorReport]:
        """MSE and PRE of each comparator, with point values when a sample is given."""
        baseline = coeffs.lam * stats.var_y
        reports = []
        for estimator in estimators:
            mse = self.classical_mse(stats, coeffs, estimator)
            point = (
                self.classical_point(stats, coeffs, estimator, sample)
                if sample is not None
                else None
            )
            reports.append(
                EstimatorReport(
                    estimator=estimator, point=point, mse1=mse, pre=pre(baseline, mse)
                )
            )
        return reports

    def pr_point(
        self, stats: SummaryStats, coeffs: DesignCoefficients, params: DualPRParams, sample: SampleMeans
    ) -> float:
        _require(stats, "PR")
        X, Z, g = stats.mean_x, stats.mean_z, coeffs.g
        x_star = dual_transform(sample.x, X, g)
        z_star = dual_transform(sample.z, Z, g)
        forward = x_star / X * Z / self._nonzero(z_star, "z*")
        backward = X / self._nonzero(x_star, "x*") * z_star / Z
        return sample.y * (params.theta * forward + (1.0 - params.theta) * backward)

    def pr_mse(self, stats: SummaryStats, coeffs: DesignCoefficients, theta: float) -> float:
        k = self.constants(stats)
        a, g = 1.0 - 2.0 * theta, coeffs.g
        return coeffs.lam * (stats.var_y + 2 * a * g * k["d"] + a**2 * g**2 * k["c"])

    def pr_report(
        self,
        stats: SummaryStats,
        coeffs: DesignCoefficients,
        params: DualPRParams,
        sample: Optional[SampleMeans] = None,
    ) -> EstimatorReport:
        """First-order bias and MSE of the dual ratio-cum-product estimator.

        The bias is (lambda / Y)[g D A + g^2 (R1^2 Sx^2 - R1 R2 Szx - theta(R1^2 Sx^2 - R2^2 Sz^2))].
        """
        if not isfinite(params.theta):
            raise DomainError(f"theta must be finite, got {params.theta}")
        k = self.constants(stats)
        g, a = coeffs.g, params.a_const
        r1, r2 = k["r1"], k["r2"]
        quadratic = (
            r1**2 * stats.var_x
            - r1 * r2 * stats.cov_zx
            - params.theta * (r1**2 * stats.var_x - r2**2 * stats.var_z)
        )
        bias = coeffs.lam / stats.mean_y * (g * k["d"] * a + g**2 * quadratic)
        mse = self.pr_mse(stats, coeffs, params.theta)
        point = self.pr_point(stats, coeffs, params, sample) if sample is not None else None
        return EstimatorReport(
            estimator="PR",
            point=point,
            bias1=bias,
            mse1=mse,
            pre=pre(coeffs.lam * stats.var_y, mse),
            note=f"theta={params.theta:.6g}",
        )

    def pr_optimum(self, stats: SummaryStats, coeffs: DesignCoefficients) -> QuadraticSummary:
        """theta0 and the minimum MSE lambda [Sy^2 + F(2D + CF)]."""
        k = self.constants(stats)
        c, d, g, lam = k["c"], k["d"], coeffs.g, coeffs.lam
        if not c > 0:
            raise DegenerateOptimumError(f"C = {c}: the auxiliaries carry no signal")
        e = (d + c * g) / c
        f = g - e
        min_mse = lam * (stats.var_y + f * (2 * d + c * f))
        simplified = lam * (stats.var_y - d**2 / c)
        if abs(min_mse - simplified) > 1e-12 * max(abs(simplified), 1.0):
            logger.warning("minimum MSE %.15g differs from lambda(Sy^2 - D^2/C) %.15g", min_mse, simplified)
        cv_x = (stats.var_x**0.5) / stats.mean_x
        cv_z = (stats.var_z**0.5) / stats.mean_z
        rho_zx = stats.cov_zx / (stats.var_z * stats.var_x) ** 0.5
        rho_yx = stats.cov_yx / (stats.var_y * stats.var_x) ** 0.5
        rho_yz = stats.cov_yz / (stats.var_y * stats.var_z) ** 0.5
        theta0 = (d + c * g) / (2 * c * g)
        logger.debug("theta0=%.6g C=%.6g D=%.6g", theta0, c, d)
        return QuadraticSummary(
            c=c,
            d=d,
            c_star=cv_x**2 + cv_z**2 - 2 * rho_zx * cv_z * cv_x,
            d_star=rho_yx * cv_x - rho_yz * cv_z,
            e=e,
            f=f,
            theta0=theta0,
            min_mse=min_mse,
        )

    def efficiency_conditions(
        self, stats: SummaryStats, coeffs: DesignCoefficients, theta: float
    ) -> List[EfficiencyCondition]:
        """The eight comparisons of the dual ratio-cum-product estimator at theta."""
        k = self.constants(stats)
        c, d, r1, r2, g = k["c"], k["d"], k["r1"], k["r2"], coeffs.g
        a = 1.0 - 2.0 * theta
        sy2, sx2, sz2 = stats.var_y, stats.var_x, stats.var_z
        syx, syz, szx = stats.cov_yx, stats.cov_yz, stats.cov_zx
        rho = stats.rho_yx if stats.rho_yx is not None else syx / (sy2 * sx2) ** 0.5
        mse_pr = self.pr_mse(stats, coeffs, theta)
        shift = a * g * (2 * d + a * g * c)
        cross = 4 * theta * (theta * g * c - g * c - d)

        def ratio(numerator: float, denominator: float) -> float:
            if denominator == 0:
                return inf if numerator > 0 else -inf if numerator < 0 else float("nan")
            return numerator / denominator

        printed = [
            ("a", "ybar", theta, ratio(2 * d + g * c, 2 * g * c), ">", True),
            ("b", "R", shift, r1 * (r1 * sx2 - 2 * syx), "<", syx < r1 * sx2 / 2),
            ("c", "P", shift, r2 * (r2 * sz2 + 2 * syz), "<", syz < r2 * sz2 / 2),
            ("d", "S", c, ratio(-2 * d, a * g - 1), "<", a == 0 or (a > 0 and g < 1 / a)),
            (
                "e",
                "R*",
                cross,
                2 * g * r1 * r2 * szx + 2 * r2 * syz - 4 * r1 * syx - g * r2**2 * sz2,
                "<",
                True,
            ),
            (
                "f",
                "P*",
                cross,
                2 * g * r1 * r2 * szx + 4 * r2 * syz - 2 * r1 * syx - g * r1**2 * sx2,
                "<",
                True,
            ),
            ("g", "SE", g, ratio(-2 * d, c * (a - 1)), "<", a < 1),
            ("h", "ST", shift, -(rho**2) * sy2, "<", True),
        ]
        conditions = []
        for name, competitor, lhs, rhs, relation, proviso in printed:
            difference = mse_pr - self.classical_mse(stats, coeffs, competitor)
            inequality = lhs > rhs if relation == ">" else lhs < rhs
            conditions.append(
                EfficiencyCondition(
                    name=name,
                    competitor=competitor,
                    holds=difference < 0,
                    mse_difference=difference,
                    printed_holds=bool(inequality and proviso),
                    lhs=lhs,
                    rhs=rhs,
                    proviso_holds=bool(proviso),
                )
            )
        return conditions

    @staticmethod
    def pre(mse_baseline: float, mse: float) -> float:
        return pre(mse_baseline, mse)

    @staticmethod
    def _nonzero(value: Optional[float], label: str) -> float:
        if value is None:
            raise IncompleteInputError(f"sample {label} is missing")
        if value == 0:
            raise SingularInputError(f"{label} is zero")
        return value
