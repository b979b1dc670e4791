from dataclasses import dataclass
from math import sqrt
from typing import Tuple

from utils.errors import DesignError, DomainError, SingularFamilyError


@dataclass(frozen=True)
class SystematicSummary:
    """Population summary for systematic sampling with interval k = N/n."""

    N: int
    n: int
    mean_y: float
    mean_x: float
    s2_y: float
    s2_x: float
    rho: float
    rho_y: float
    rho_x: float
    calibrated: bool = False

    def __post_init__(self) -> None:
        if self.n < 2 or self.N % self.n != 0:
            raise DesignError(f"systematic sampling needs N = n*k, got (N={self.N}, n={self.n})")
        for name in ("rho_y", "rho_x"):
            value = getattr(self, name)
            if not -1.0 / (self.n - 1) <= value <= 1.0:
                raise DomainError(f"{name} = {value} outside [-1/(n-1), 1]")
        if 1.0 + (self.n - 1) * self.rho_x <= 0:
            raise DomainError("1 + (n-1) rho_x must be positive")

    @property
    def k(self) -> int:
        return self.N // self.n

    @property
    def f(self) -> float:
        return self.n / self.N

    @property
    def base(self) -> float:
        """(N-1)/(nN)."""
        return (self.N - 1) / (self.n * self.N)

    @property
    def design_effect_y(self) -> float:
        return 1.0 + (self.n - 1) * self.rho_y

    @property
    def design_effect_x(self) -> float:
        return 1.0 + (self.n - 1) * self.rho_x

    @property
    def cv_y(self) -> float:
        return sqrt(self.s2_y) / self.mean_y

    @property
    def cv_x(self) -> float:
        return sqrt(self.s2_x) / self.mean_x

    @property
    def rho_star(self) -> float:
        return sqrt(self.design_effect_y / self.design_effect_x)

    @property
    def k_const(self) -> float:
        return self.rho * self.cv_y / self.cv_x


@dataclass(frozen=True)
class NonResponseSpec:
    """Non-response stratum weight, inverse follow-up fraction and mean square."""

    w2: float
    big_l: float
    s2_y2: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.w2 <= 1.0:
            raise DomainError(f"W2 must lie in [0, 1], got {self.w2}")
        if self.big_l <= 1.0:
            raise DomainError(f"L must exceed 1, got {self.big_l}")
        if self.s2_y2 < 0.0:
            raise DomainError(f"S_Y2^2 must be non-negative, got {self.s2_y2}")

    def term(self, n: int) -> float:
        """((L-1)/n) W2 S_Y2^2."""
        if self.w2 == 0.0:
            return 0.0
        return (self.big_l - 1.0) / n * self.w2 * self.s2_y2


@dataclass(frozen=True)
class FactorTypeParams:
    """Polynomial coefficients of the factor-type family at one alpha."""

    alpha: float
    f: float

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if self.denominator == 0.0:
            raise SingularFamilyError(
                f"factor-type family is singular at alpha = {self.alpha} (A + fB + C = 0)"
            )

    @property
    def a(self) -> float:
        return (self.alpha - 1.0) * (self.alpha - 2.0)

    @property
    def b(self) -> float:
        return (self.alpha - 1.0) * (self.alpha - 4.0)

    @property
    def c(self) -> float:
        return (self.alpha - 2.0) * (self.alpha - 3.0) * (self.alpha - 4.0)

    @property
    def denominator(self) -> float:
        return self.a + self.f * self.b + self.c

    @property
    def phi1(self) -> float:
        return self.f * self.b / self.denominator

    @property
    def phi2(self) -> float:
        return self.c / self.denominator

    @property
    def phi(self) -> float:
        return self.phi2 - self.phi1


@dataclass(frozen=True)
class AlphaOptimum:
    """Positive real roots of phi(alpha) = rho* K and the MSE they attain."""

    target: float
    roots: Tuple[float, ...]
    all_roots: Tuple[complex, ...]
    chosen: float
    min_mse: float
    regression_mse: float
