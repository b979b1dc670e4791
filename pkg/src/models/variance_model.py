from dataclasses import dataclass
from enum import Enum
from typing import Optional

from utils.errors import DomainError


class VarianceOptimaMode(Enum):
    AS_PRINTED = "as-printed"
    GRID = "grid"


class ProductSign(Enum):
    """Sign of the d*_202 term in the MSE of the exponential product estimator."""

    PLUS = "plus"
    AS_PRINTED = "as-printed"


@dataclass(frozen=True)
class VarianceFamilyParams:
    """Constants of the variance estimators t4..t7 and t4'..t7'.

    The estimators depend on (a, b, c, d) only through x1 = d/(c-d) and
    x2 = b/(a+b).
    """

    a: float = 0.0
    b: float = 1.0
    c: float = 2.0
    d: float = 1.0
    p: float = 1.0
    q: float = 1.0
    k4: float = 0.5
    k7: float = 0.5
    k4_prime: float = 0.5
    k7_prime: float = 0.5

    def __post_init__(self) -> None:
        if self.c == self.d:
            raise DomainError("c and d must differ")
        if self.a + self.b == 0:
            raise DomainError("a + b must be non-zero")

    @property
    def x1(self) -> float:
        return self.d / (self.c - self.d)

    @property
    def x2(self) -> float:
        return self.b / (self.a + self.b)

    @classmethod
    def from_shape(cls, x1: float, x2: float, **others: float) -> "VarianceFamilyParams":
        """Parameters with the given x1 and x2 (c = 1 + x1, d = x1, a = 1 - x2, b = x2)."""
        return cls(a=1.0 - x2, b=x2, c=1.0 + x1, d=x1, **others)


@dataclass(frozen=True)
class QuadraticCoeffs:
    """Coefficients of the combined estimators' quadratic MSEs."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    a_prime: Optional[float] = None
    b_prime: Optional[float] = None
    c_prime: Optional[float] = None
    d_prime: Optional[float] = None
    e_prime: Optional[float] = None
    a1: Optional[float] = None
    b1: Optional[float] = None
    c1: Optional[float] = None
    d1: Optional[float] = None
    e1: Optional[float] = None


@dataclass(frozen=True)
class VarianceOptima:
    """Optimal constants of the variance estimators under one mode."""

    mode: VarianceOptimaMode
    x1: float
    x2: float
    k4: float
    k7: float
    k4_prime: Optional[float] = None
    k7_prime: Optional[float] = None
    p: float = 1.0
    q: float = 1.0

    def params(self) -> VarianceFamilyParams:
        """Family parameters realizing these optima."""
        return VarianceFamilyParams.from_shape(
            self.x1,
            self.x2,
            p=self.p,
            q=self.q,
            k4=self.k4,
            k7=self.k7,
            k4_prime=self.k4 if self.k4_prime is None else self.k4_prime,
            k7_prime=self.k7 if self.k7_prime is None else self.k7_prime,
        )
