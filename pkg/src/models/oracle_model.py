from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Tuple

import numpy as np

from models.population_model import FinitePopulation
from utils.errors import DesignError

DEFAULT_ENUMERATION_CAP = 10_000_000


class DesignKind(Enum):
    SRSWOR = "srswor"
    SYSTEMATIC = "systematic"
    SRSWOR_NONRESPONSE = "srswor-with-nonresponse"
    TWO_PHASE = "two-phase"
    STRATIFIED = "stratified"


@dataclass(frozen=True)
class NonResponseDesign:
    """Follow-up of non-respondents: subsample 1/L of them."""

    big_l: float
    responder_column: str = "responder"

    def __post_init__(self) -> None:
        if self.big_l <= 1.0:
            raise DesignError(f"L must exceed 1, got {self.big_l}")


@dataclass(frozen=True)
class DesignSpec:
    """A sampling design for the enumeration and Monte-Carlo oracles."""

    kind: DesignKind
    n: int
    k: Optional[int] = None
    n_prime: Optional[int] = None
    nonresponse: Optional[NonResponseDesign] = None
    allocation: Optional[Mapping[str, int]] = None
    seed: int = 0
    replicates: int = 10_000
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DesignError(f"sample size must be positive, got {self.n}")
        if self.kind is DesignKind.SRSWOR_NONRESPONSE and self.nonresponse is None:
            raise DesignError("srswor-with-nonresponse needs a non-response spec")
        if self.kind is DesignKind.TWO_PHASE and self.n_prime is None:
            raise DesignError("two-phase design needs n'")
        if self.kind is DesignKind.STRATIFIED and not self.allocation:
            raise DesignError("stratified design needs an allocation")
        if self.nonresponse is not None and self.kind not in (
            DesignKind.SRSWOR_NONRESPONSE,
            DesignKind.SYSTEMATIC,
        ):
            raise DesignError(f"non-response follow-up is not supported for {self.kind.value}")
        if self.replicates < 2:
            raise DesignError(f"need at least 2 replicates, got {self.replicates}")
        if not 0 <= self.seed < 2**64:
            raise DesignError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    def validate_for(self, population: FinitePopulation) -> None:
        N = population.N
        if self.kind is DesignKind.SYSTEMATIC:
            k = self.k if self.k is not None else N // self.n
            if self.n * k != N:
                raise DesignError(f"systematic sampling needs N = n*k, got (N={N}, n={self.n}, k={k})")
        elif self.kind is DesignKind.TWO_PHASE:
            if not self.n < self.n_prime <= N:
                raise DesignError(f"need n < n' <= N, got (n={self.n}, n'={self.n_prime}, N={N})")
        elif self.kind is DesignKind.STRATIFIED:
            population.require("stratum")
        elif self.n > N:
            raise DesignError(f"need n <= N, got (n={self.n}, N={N})")
        if self.nonresponse is not None:
            population.require(self.nonresponse.responder_column)


@dataclass(frozen=True)
class Draw:
    """One realized sample handed to an estimator function."""

    population: FinitePopulation
    units: np.ndarray
    first_phase: Optional[np.ndarray] = None
    strata_units: Optional[Tuple[Tuple[float, np.ndarray], ...]] = None
    ybar_star: Optional[float] = None

    @property
    def n(self) -> int:
        return int(self.units.size)

    def mean(self, column: str = "y") -> float:
        if column == "y" and self.ybar_star is not None:
            return self.ybar_star
        return float(self.population.column(column)[self.units].mean())

    def variance(self, column: str = "y") -> float:
        return float(self.population.column(column)[self.units].var(ddof=1))

    def first_phase_mean(self, column: str) -> float:
        if self.first_phase is None:
            raise DesignError("draw has no first phase")
        return float(self.population.column(column)[self.first_phase].mean())

    def first_phase_variance(self, column: str) -> float:
        if self.first_phase is None:
            raise DesignError("draw has no first phase")
        return float(self.population.column(column)[self.first_phase].var(ddof=1))

    def stratified_mean(self, column: str = "y") -> float:
        """Sum of W_h times the stratum sample means."""
        if self.strata_units is None:
            raise DesignError("draw is not stratified")
        values = self.population.column(column)
        return sum(weight * float(values[units].mean()) for weight, units in self.strata_units)


@dataclass(frozen=True)
class HansenHurwitzDraw:
    """Outcome of one non-response follow-up."""

    ybar_star: float
    n1: int
    n2: int
    h2: int
    followed_up: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0, dtype=int))


@dataclass(frozen=True)
class SimulationResult:
    """Mean, bias and MSE of an estimator over a design."""

    estimator_id: str
    mean: float
    bias: float
    mse: float
    mc_std_error: float
    mse_std_error: float
    count: int
    exact: bool
    target: float


@dataclass(frozen=True)
class IdentityCheck:
    """One expansion-moment identity: closed form against enumeration."""

    identity: str
    analytic: float
    enumerated: float
    rel_diff: float
    expected_exact: bool = True
