from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional


class MeanEstimator(Enum):
    """Ratio-type mean estimators sharing one expansion framework."""

    T1 = "t1"  # (1-alpha) ybar + alpha ybar X/xbar
    T2 = "t2"  # ybar [X/(beta xbar + (1-beta) X)]^g
    T3 = "t3"  # ybar [2 - (xbar/X)^w]
    T4 = "t4"  # ybar [(xbar + a(X-xbar))/(xbar + b(X-xbar))]^p
    T5 = "t5"  # ybar [2 - (xbar/X)^lambda exp(delta (xbar-X)/(xbar+X))]


class ExpansionMode(Enum):
    """Which bias/MSE expressions to evaluate."""

    AS_PRINTED = "as-printed"
    DERIVED = "derived"


TUNING_PARAMETER = {
    MeanEstimator.T1: "alpha",
    MeanEstimator.T2: "beta",
    MeanEstimator.T3: "w",
    MeanEstimator.T4: "p",
    MeanEstimator.T5: "lambda_exp",
}


@dataclass(frozen=True)
class MeanFamilyParams:
    """Parameters of one member of the ratio-type mean family.

    Only the fields of the selected estimator matter. The derived constants
    are properties so they always follow the primitives.
    """

    estimator: MeanEstimator
    alpha: float = 1.0
    beta: float = 1.0
    g_exp: float = 1.0
    w: float = 1.0
    a: float = 0.0
    b: float = 1.0
    p: float = 1.0
    lambda_exp: float = 1.0
    delta: float = 0.0
    d3_override: Optional[float] = None

    @property
    def d(self) -> float:
        return self.p * (self.b - self.a)

    @property
    def d1(self) -> float:
        return self.d * (self.b - self.a) * (self.p - 1.0) / 2.0

    @property
    def d2(self) -> float:
        return self.d1 * (self.b - self.a) * (self.p - 2.0) / 3.0

    @property
    def d3(self) -> float:
        """Continues the D1, D2 pattern unless overridden."""
        if self.d3_override is not None:
            return self.d3_override
        return self.d2 * (self.b - self.a) * (self.p - 3.0) / 4.0

    @property
    def k(self) -> float:
        return (self.delta + 2.0 * self.lambda_exp) / 2.0

    @property
    def m_const(self) -> float:
        lam, delta = self.lambda_exp, self.delta
        return 0.5 * (
            (delta**3 - 6.0 * delta**2) / 24.0
            + lam * (delta**2 - 2.0 * delta) / 4.0
            + lam * (lam - 1.0) / 2.0 * delta
            + lam * (lam - 1.0) * (lam - 2.0) / 3.0
        )

    @property
    def n_const(self) -> float:
        lam, delta = self.lambda_exp, self.delta
        return (
            (delta**4 - 12.0 * delta**3 + 12.0 * delta**2) / 48.0
            + lam * (delta**3 - 6.0 * delta) / 6.0
            + lam * (lam - 1.0) / 2.0 * (delta**2 - 2.0 * delta)
            + lam * (lam - 1.0) * (lam - 2.0) * (lam - 3.0) / 3.0
        ) / 8.0

    @property
    def tuning_value(self) -> float:
        return getattr(self, TUNING_PARAMETER[self.estimator])

    def tuned(self, value: float) -> "MeanFamilyParams":
        """Copy with the family's tuning parameter set to ``value``."""
        return replace(self, **{TUNING_PARAMETER[self.estimator]: value})


@dataclass(frozen=True)
class FamilyOptimum:
    """Optimal tuning parameter and the first-order MSE it achieves."""

    estimator: MeanEstimator
    parameter: str
    value: float
    mse1: float
    grid_mse1: Optional[float] = None
