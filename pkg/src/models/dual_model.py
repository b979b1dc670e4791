from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class DualPRParams:
    """Mixing weight of the dual ratio-cum-product estimator."""

    theta: float

    @property
    def a_const(self) -> float:
        return 1.0 - 2.0 * self.theta


@dataclass(frozen=True)
class SampleMeans:
    """Sample means of y, x and z."""

    y: float
    x: Optional[float] = None
    z: Optional[float] = None


@dataclass(frozen=True)
class QuadraticSummary:
    """Constants of the quadratic MSE of the dual ratio-cum-product estimator."""

    c: float
    d: float
    c_star: float
    d_star: float
    e: float
    f: float
    theta0: float
    min_mse: float


@dataclass(frozen=True)
class EfficiencyCondition:
    """One efficiency condition of the dual ratio-cum-product estimator.

    ``holds`` is the direct MSE comparison; ``printed_holds`` evaluates the
    printed inequality together with its proviso.
    """

    name: str
    competitor: str
    holds: bool
    mse_difference: float
    printed_holds: bool
    lhs: float
    rhs: float
    proviso_holds: bool = True
