from math import exp
from typing import Callable, Dict, List, Optional

from models.moment_model import PartialMomentTable
from models.report_model import EstimatorReport
from models.variance_model import (
    ProductSign,
    QuadraticCoeffs,
    VarianceFamilyParams,
    VarianceOptima,
    VarianceOptimaMode,
)
from utils.efficiency import pre
from utils.errors import DegenerateOptimumError, DesignError, DomainError, SingularInputError
from utils.logger import configure_logger
from utils.optimize import grid_minimize, search_interval

logger = configure_logger(__name__)

SINGLE_PHASE = ("t1", "t2", "t3", "t4", "t5", "t6", "t7")
TWO_PHASE = ("t2'", "t3'", "t4'", "t5'", "t6'", "t7'")


class VarianceManager:
    """Business logic for estimators of the population variance of y.

    MSEs are relative to S_y^4 unless ``s2_y`` is given.
    """

    def __init__(self, t3_sign: ProductSign = ProductSign.PLUS) -> None:
        self.t3_sign = t3_sign

    def var_sy2(self, partials: PartialMomentTable, n: int, s2_y: float = 1.0) -> float:
        """First-order variance of the sample variance, S_y^4 d*_400 / n."""
        self._check_n(n)
        return s2_y**2 * partials.starred(4, 0, 0) / n

    def var_point(
        self,
        sample_var_y: float,
        sample_var_x: float,
        sample_var_z: float,
        pop_var_x: float,
        pop_var_z: float,
        params: VarianceFamilyParams,
    ) -> Dict[str, float]:
        """Values of t1..t7 for one sample."""
        for label, value in (
            ("s_x^2", sample_var_x),
            ("s_z^2", sample_var_z),
            ("S_x^2", pop_var_x),
            ("S_z^2", pop_var_z),
        ):
            if not value > 0:
                raise SingularInputError(f"{label} must be positive, got {value}")
        ratio_x = exp((pop_var_x - sample_var_x) / (pop_var_x + sample_var_x))
        product_z = exp((sample_var_z - pop_var_z) / (sample_var_z + pop_var_z))
        shaped_x = self._power(
            (params.c * pop_var_x - params.d * sample_var_x) / ((params.c - params.d) * pop_var_x),
            params.p,
            "t5",
        )
        z_denominator = params.a * pop_var_z + params.b * sample_var_z
        if z_denominator == 0:
            raise SingularInputError("a S_z^2 + b s_z^2 vanishes")
        shaped_z = self._power((params.a + params.b) * pop_var_z / z_denominator, params.q, "t6")
        s2 = sample_var_y
        return {
            "t1": s2 * pop_var_x / sample_var_x,
            "t2": s2 * ratio_x,
            "t3": s2 * product_z,
            "t4": s2 * (params.k4 * ratio_x + (1 - params.k4) * product_z),
            "t5": s2 * shaped_x,
            "t6": s2 * shaped_z,
            "t7": s2 * (params.k7 * shaped_x + (1 - params.k7) * shaped_z),
        }

    def quadratic_coeffs(
        self,
        partials: PartialMomentTable,
        n: int,
        params: VarianceFamilyParams,
        n_prime: Optional[int] = None,
    ) -> QuadraticCoeffs:
        """Coefficients of the combined estimators' MSEs at the given x1, x2."""
        partials.require_starred()
        d = partials.starred
        u, v = params.p * params.x1, params.q * params.x2
        values = dict(
            a=d(4, 0, 0),
            b=u**2 * d(0, 4, 0),
            c=v**2 * d(0, 0, 4),
            d=u * d(2, 2, 0),
            e=u * v * d(0, 2, 2),
            f=v * d(2, 0, 2),
        )
        if n_prime is not None:
            self._check_phases(n, n_prime)
            gap = 1.0 / n - 1.0 / n_prime
            values.update(
                a_prime=d(4, 0, 0) / n,
                b_prime=gap / 4 * d(0, 4, 0),
                c_prime=d(0, 0, 4) / (4 * n_prime),
                d_prime=-gap * d(2, 2, 0),
                e_prime=d(2, 0, 2) / n_prime,
                a1=d(4, 0, 0) / n,
                b1=u**2 * gap * d(0, 4, 0),
                c1=v**2 * d(0, 0, 4) / n_prime,
                d1=-u * gap * d(2, 2, 0),
                e1=v * d(2, 0, 2) / n_prime,
            )
        return QuadraticCoeffs(**values)

    def single_phase_mse(
        self, partials: PartialMomentTable, n: int, params: VarianceFamilyParams
    ) -> Dict[str, float]:
        """Relative first-order MSE of t1..t7."""
        self._check_n(n)
        partials.require_starred()
        d = partials.starred
        q = self.quadratic_coeffs(partials, n, params)
        t3_cross = d(2, 0, 2) if self.t3_sign is ProductSign.PLUS else -d(2, 0, 2)
        mse = {
            "t1": q.a + d(0, 4, 0) - 2 * d(2, 2, 0),
            "t2": q.a + d(0, 4, 0) / 4 - d(2, 2, 0),
            "t3": q.a + d(0, 0, 4) / 4 + t3_cross,
            "t4": self._t4(d, params.k4),
            "t5": q.a + q.b - 2 * q.d,
            "t6": q.a + q.c - 2 * q.f,
            "t7": self._t7(q, params.k7),
        }
        return {name: value / n for name, value in mse.items()}

    def two_phase_mse(
        self, partials: PartialMomentTable, n: int, n_prime: int, params: VarianceFamilyParams
    ) -> Dict[str, float]:
        """Relative first-order MSE of t2'..t7'."""
        q = self.quadratic_coeffs(partials, n, params, n_prime)
        d = partials.starred
        gap = 1.0 / n - 1.0 / n_prime
        return {
            "t2'": q.a_prime + gap / 4 * d(0, 4, 0) - gap * d(2, 2, 0),
            "t3'": q.a_prime + gap / 4 * d(0, 0, 4) + gap * d(2, 0, 2),
            "t4'": self._t4_prime(q, params.k4_prime),
            "t5'": q.a1 + q.b1 + 2 * q.d1,
            "t6'": q.a1 + q.c1 - 2 * q.e1,
            "t7'": self._t7_prime(q, params.k7_prime),
        }

    def var_single_report(
        self,
        partials: PartialMomentTable,
        n: int,
        params: Optional[VarianceFamilyParams] = None,
        mode: Optional[VarianceOptimaMode] = VarianceOptimaMode.AS_PRINTED,
        s2_y: float = 1.0,
    ) -> List[EstimatorReport]:
        """MSE and PRE of t1..t7; tuned constants come from ``mode`` unless it is None."""
        params = self._resolve(partials, n, None, params, mode)
        mse = self.single_phase_mse(partials, n, params)
        return self._reports(mse, partials.starred(4, 0, 0) / n, s2_y, mode)

    def var_twophase_report(
        self,
        partials: PartialMomentTable,
        n: int,
        n_prime: int,
        params: Optional[VarianceFamilyParams] = None,
        mode: Optional[VarianceOptimaMode] = VarianceOptimaMode.AS_PRINTED,
        s2_y: float = 1.0,
    ) -> List[EstimatorReport]:
        """MSE and PRE of t2'..t7' against the single-phase sample variance."""
        params = self._resolve(partials, n, n_prime, params, mode)
        mse = self.two_phase_mse(partials, n, n_prime, params)
        return self._reports(mse, partials.starred(4, 0, 0) / n, s2_y, mode)

    def var_optima(
        self,
        partials: PartialMomentTable,
        n: int,
        n_prime: Optional[int] = None,
        mode: VarianceOptimaMode = VarianceOptimaMode.AS_PRINTED,
        p: float = 1.0,
        q: float = 1.0,
    ) -> VarianceOptima:
        """Optimal x1, x2 and mixing constants k4, k7 (and k4', k7' with a first phase)."""
        partials.require_starred()
        d = partials.starred
        if d(0, 4, 0) <= 0 or d(0, 0, 4) <= 0:
            raise DegenerateOptimumError("d*_040 and d*_004 must be positive")
        x1 = d(2, 2, 0) / (p * d(0, 4, 0))
        x2 = d(2, 0, 2) / (q * d(0, 0, 4))
        shape = VarianceFamilyParams.from_shape(x1, x2, p=p, q=q)
        coeffs = self.quadratic_coeffs(partials, n, shape, n_prime)

        if mode is VarianceOptimaMode.AS_PRINTED:
            k4 = self._ratio(
                d(0, 0, 4) / 2 + d(2, 2, 0) + d(0, 2, 2),
                2 * (d(0, 4, 0) + d(0, 0, 4) + d(0, 2, 2)),
                "k4",
            )
            k7 = self._ratio(
                coeffs.c + coeffs.d - coeffs.f - coeffs.e,
                coeffs.b + coeffs.c - 2 * coeffs.e,
                "k7",
            )
        else:
            k4 = self._vertex(lambda k: self._t4(d, k), "k4")
            k7 = self._vertex(lambda k: self._t7(coeffs, k), "k7")
        k4_prime = k7_prime = None
        if n_prime is not None:
            if mode is VarianceOptimaMode.AS_PRINTED:
                k4_prime = self._ratio(
                    2 * coeffs.c_prime + coeffs.e_prime - coeffs.d_prime,
                    2 * (coeffs.b_prime + coeffs.c_prime),
                    "k4'",
                )
                k7_prime = self._ratio(
                    coeffs.c1 - coeffs.d1 - coeffs.e1, coeffs.b1 + coeffs.c1, "k7'"
                )
            else:
                k4_prime = self._vertex(lambda k: self._t4_prime(coeffs, k), "k4'")
                k7_prime = self._vertex(lambda k: self._t7_prime(coeffs, k), "k7'")
        optima = VarianceOptima(
            mode=mode,
            x1=x1,
            x2=x2,
            k4=k4,
            k7=k7,
            k4_prime=k4_prime,
            k7_prime=k7_prime,
            p=p,
            q=q,
        )
        logger.debug("variance optima (%s): %s", mode.value, optima)
        return optima

    def _resolve(self, partials, n, n_prime, params, mode) -> VarianceFamilyParams:
        if mode is None:
            if params is None:
                raise DomainError("either parameters or an optima mode is required")
            return params
        base = params or VarianceFamilyParams()
        return self.var_optima(partials, n, n_prime, mode, p=base.p, q=base.q).params()

    @staticmethod
    def _reports(mse: Dict[str, float], baseline: float, s2_y: float, mode) -> List[EstimatorReport]:
        scale = s2_y**2
        note = mode.value if mode is not None else "given constants"
        reports = []
        for name, value in mse.items():
            usable = value > 0
            reports.append(
                EstimatorReport(
                    estimator=name,
                    mse1=value * scale,
                    pre=pre(baseline, value) if usable else None,
                    note=note if usable else "non-positive first-order MSE",
                )
            )
        return reports

    @staticmethod
    def _t4(d: Callable[[int, int, int], float], k: float) -> float:
        return (
            d(4, 0, 0)
            + k**2 * d(0, 4, 0) / 4
            + (1 - k) ** 2 * d(0, 0, 4) / 4
            - k * d(2, 2, 0)
            + (1 - k) * d(2, 0, 2)
            - k * (1 - k) / 2 * d(0, 2, 2)
        )

    @staticmethod
    def _t7(q: QuadraticCoeffs, k: float) -> float:
        return (
            q.a
            + k**2 * q.b
            + (1 - k) ** 2 * q.c
            - 2 * k * q.d
            - 2 * (1 - k) * q.f
            + 2 * k * (1 - k) * q.e
        )

    @staticmethod
    def _t4_prime(q: QuadraticCoeffs, k: float) -> float:
        return q.a_prime + k**2 * q.b_prime + (1 - k) ** 2 * q.c_prime + k * q.d_prime + (1 - k) * q.e_prime

    @staticmethod
    def _t7_prime(q: QuadraticCoeffs, k: float) -> float:
        return q.a1 + q.b1 * k**2 + (k - 1) ** 2 * q.c1 + 2 * k * q.d1 + 2 * (k - 1) * q.e1

    @staticmethod
    def _vertex(objective: Callable[[float], float], label: str) -> float:
        """Minimizer of a quadratic in one constant, confirmed on a grid."""
        at_zero, at_one, at_minus = objective(0.0), objective(1.0), objective(-1.0)
        curvature = (at_one + at_minus - 2 * at_zero) / 2
        slope = (at_one - at_minus) / 2
        if not curvature > 0:
            raise DegenerateOptimumError(f"MSE is not convex in {label}")
        vertex = -slope / (2 * curvature)
        grid = grid_minimize(objective, *search_interval(vertex))
        if grid.minimum < objective(vertex) - 1e-12 * max(1.0, abs(grid.minimum)):
            raise DegenerateOptimumError(
                f"grid minimum of {label} at {grid.argmin:.6g} beats the vertex {vertex:.6g}; "
                "the MSE is not quadratic in it"
            )
        return vertex

    @staticmethod
    def _ratio(numerator: float, denominator: float, label: str) -> float:
        if denominator == 0:
            raise DegenerateOptimumError(f"{label} has a zero denominator")
        return numerator / denominator

    @staticmethod
    def _power(base: float, exponent: float, label: str) -> float:
        if base <= 0 and exponent != int(exponent):
            raise DomainError(f"{label}: non-integer power of a non-positive base")
        return base**exponent

    @staticmethod
    def _check_n(n: int) -> None:
        if n < 2:
            raise DesignError(f"need n >= 2, got {n}")

    def _check_phases(self, n: int, n_prime: int) -> None:
        self._check_n(n)
        if not n < n_prime:
            raise DesignError(f"need n < n', got (n={n}, n'={n_prime})")
