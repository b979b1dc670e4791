from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from utils.errors import DomainError


class OptimaMode(Enum):
    AS_PRINTED = "as-printed"
    MINIMIZING = "minimizing"


class FormulaVariant(Enum):
    AS_PRINTED = "as-printed"
    CORRECTED = "corrected"


@dataclass(frozen=True)
class AttributeParams:
    """Constants of the two-attribute estimators t5, t6 and t7."""

    w1: float = 0.5
    w2: float = 0.5
    k61: float = 1.0
    k62: float = 0.0
    k71: float = 0.0
    k72: float = 0.0

    def __post_init__(self) -> None:
        if abs(self.w1 + self.w2 - 1.0) > 1e-12:
            raise DomainError(f"w1 + w2 must equal 1, got {self.w1} + {self.w2}")

    @classmethod
    def with_w1(cls, w1: float, **others: float) -> "AttributeParams":
        return cls(w1=w1, w2=1.0 - w1, **others)


@dataclass(frozen=True)
class AttributeOptima:
    """Optimal constants under one mode and the first-order MSE they attain."""

    mode: OptimaMode
    params: AttributeParams
    mse: Mapping[str, float]
    grid_mse: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class SampleSizeFit:
    """Sample size whose PRE lies closest to a target value."""

    estimator: str
    n: int
    pre: float
    target: float

    @property
    def rel_residual(self) -> float:
        return (self.pre - self.target) / self.target
