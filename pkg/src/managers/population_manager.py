from typing import Optional, Sequence, Tuple

import numpy as np

from models.population_model import (
    AttributeSummary,
    DesignCoefficients,
    Divisor,
    FinitePopulation,
    SummaryStats,
)
from utils.errors import DegenerateMomentError, SchemaError
from utils.logger import configure_logger

logger = configure_logger(__name__)


class PopulationManager:
    """Business logic for population summaries."""

    def __init__(self, divisor: Divisor = Divisor.N_MINUS_1) -> None:
        self.divisor = divisor

    def summarize_numeric(self, pop: FinitePopulation) -> SummaryStats:
        """Means, mean squares, covariances and correlations of y, x and z."""
        if not (pop.has("x") or pop.has("z")):
            raise SchemaError("population needs y and at least one of x, z")
        ddof = self.divisor.ddof
        y = pop.y
        var_y = float(np.var(y, ddof=ddof))
        stats = {
            "N": pop.N,
            "mean_y": float(y.mean()),
            "var_y": var_y,
            "cv_y": self._cv(var_y, float(y.mean())),
            "divisor": self.divisor,
        }
        for name in ("x", "z"):
            if not pop.has(name):
                continue
            values = pop.column(name)
            mean = float(values.mean())
            var = float(np.var(values, ddof=ddof))
            stats[f"mean_{name}"] = mean
            stats[f"var_{name}"] = var
            stats[f"cv_{name}"] = self._cv(var, mean)
        pairs = (("yx", "y", "x"), ("yz", "y", "z"), ("zx", "z", "x"))
        for key, first, second in pairs:
            if not (pop.has(first) and pop.has(second)):
                continue
            a, b = pop.column(first), pop.column(second)
            cov = float(np.cov(a, b, ddof=ddof)[0, 1])
            stats[f"cov_{key}"] = cov
            stats[f"rho_{key}"] = self._correlation(cov, a, b, first, second)
        if pop.has("x"):
            stats["ratio_r1"] = stats["mean_y"] / stats["mean_x"] if stats["mean_x"] else None
        if pop.has("z"):
            stats["ratio_r2"] = stats["mean_y"] / stats["mean_z"] if stats["mean_z"] else None
        logger.debug("summarized %d units with divisor %s", pop.N, self.divisor.value)
        return SummaryStats(**stats)

    def summarize_attributes(self, pop: FinitePopulation) -> AttributeSummary:
        """Proportions, point bi-serial and phi correlations of two attributes."""
        pop.require("phi1", "phi2")
        ddof = self.divisor.ddof
        y, phi1, phi2 = pop.y, pop.phi1, pop.phi2
        p1, p2 = float(phi1.mean()), float(phi2.mean())
        for label, proportion in (("phi1", p1), ("phi2", p2)):
            if proportion in (0.0, 1.0):
                raise DegenerateMomentError(
                    f"attribute '{label}' has proportion {proportion}; its CV is undefined"
                )
        cov = np.cov(np.vstack([y, phi1, phi2]), ddof=ddof)
        var_y, var_phi1, var_phi2 = float(cov[0, 0]), float(cov[1, 1]), float(cov[2, 2])
        if var_y == 0.0:
            raise DegenerateMomentError("column 'y' has zero variance")
        return AttributeSummary(
            N=pop.N,
            mean_y=float(y.mean()),
            var_y=var_y,
            p1=p1,
            p2=p2,
            var_phi1=var_phi1,
            var_phi2=var_phi2,
            rho_pb1=float(cov[0, 1] / np.sqrt(var_y * var_phi1)),
            rho_pb2=float(cov[0, 2] / np.sqrt(var_y * var_phi2)),
            rho_phi=float(cov[1, 2] / np.sqrt(var_phi1 * var_phi2)),
            cov_y_phi1=float(cov[0, 1]),
            cov_y_phi2=float(cov[0, 2]),
            cov_phi1_phi2=float(cov[1, 2]),
            divisor=self.divisor,
        )

    @staticmethod
    def _cv(var: float, mean: float) -> Optional[float]:
        return float(np.sqrt(var) / abs(mean)) if mean != 0 else None

    def _correlation(self, cov: float, a: np.ndarray, b: np.ndarray, first: str, second: str) -> float:
        ddof = self.divisor.ddof
        for name, values in ((first, a), (second, b)):
            if np.all(values == values[0]):
                other = second if name == first else first
                raise DegenerateMomentError(
                    f"column '{name}' has zero variance; correlation with '{other}' is undefined"
                )
        rho = cov / np.sqrt(np.var(a, ddof=ddof) * np.var(b, ddof=ddof))
        return float(np.clip(rho, -1.0, 1.0))


def design_coefficients(
    N: int,
    n: int,
    n_prime: Optional[int] = None,
    strata_sizes: Optional[Sequence[Tuple[int, int]]] = None,
) -> DesignCoefficients:
    """Sampling fractions and SRSWOR coefficients for (N, n[, n'])."""
    gamma_h = None
    if strata_sizes is not None:
        gamma_h = tuple((1.0 - n_h / N_h) / n_h for N_h, n_h in strata_sizes)
    return DesignCoefficients(N=N, n=n, n_prime=n_prime, gamma_h=gamma_h)
