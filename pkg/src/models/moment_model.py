from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np

from utils.errors import DesignError, DomainError, IncompleteInputError

Index2 = Tuple[int, int]
Index3 = Tuple[int, int, int]

STARRED_INDICES = ((4, 0, 0), (0, 4, 0), (0, 0, 4), (2, 2, 0), (2, 0, 2), (0, 2, 2))


class MomentSource(Enum):
    RAW_DATA = "raw-data"
    USER_SUPPLIED = "user-supplied"


@dataclass(frozen=True)
class MomentTable:
    """Relative central product moments C_pq, p the power of x and q of y.

    C_pq = mu_pq / (meanX**p * meanY**q) with mu_pq = (1/N) sum (x-X)^p (y-Y)^q.
    """

    entries: Mapping[Index2, float]
    source: MomentSource = MomentSource.USER_SUPPLIED
    notes: Mapping[str, str] = field(default_factory=dict)

    def get(self, p: int, q: int) -> float:
        if (p, q) == (0, 0):
            return 1.0
        if (p, q) in ((1, 0), (0, 1)) and (p, q) not in self.entries:
            return 0.0
        try:
            return float(self.entries[(p, q)])
        except KeyError:
            raise IncompleteInputError(f"moment C_{p}{q} is not available") from None

    def has(self, p: int, q: int) -> bool:
        return (p, q) in self.entries or (p, q) in ((0, 0), (1, 0), (0, 1))

    def require(self, pairs: Iterable[Index2]) -> None:
        missing = [f"C_{p}{q}" for p, q in pairs if not self.has(p, q)]
        if missing:
            raise IncompleteInputError(f"missing moments: {', '.join(missing)}")

    def with_entry(self, p: int, q: int, value: float, note: str = "") -> "MomentTable":
        entries = dict(self.entries)
        entries[(p, q)] = value
        notes = dict(self.notes)
        if note:
            notes[f"C{p}{q}"] = note
        return MomentTable(entries, self.source, notes)


@dataclass(frozen=True)
class PartialMomentTable:
    """Standardized product moments of (y, x, z) with powers (p, q, r)."""

    entries: Mapping[Index3, float]
    source: MomentSource = MomentSource.USER_SUPPLIED
    notes: Mapping[str, str] = field(default_factory=dict)

    def value(self, p: int, q: int, r: int) -> float:
        if (p, q, r) in ((2, 0, 0), (0, 2, 0), (0, 0, 2)) and (p, q, r) not in self.entries:
            return 1.0
        try:
            return float(self.entries[(p, q, r)])
        except KeyError:
            raise IncompleteInputError(f"moment d_{p}{q}{r} is not available") from None

    def starred(self, p: int, q: int, r: int) -> float:
        """d*_pqr = d_pqr - 1, defined for the indices the variance estimators use."""
        if (p, q, r) not in STARRED_INDICES:
            raise DomainError(f"starred form is not defined for d_{p}{q}{r}")
        return self.value(p, q, r) - 1.0

    def require_starred(self) -> None:
        missing = [
            f"d_{p}{q}{r}" for p, q, r in STARRED_INDICES if (p, q, r) not in self.entries
        ]
        if missing:
            raise IncompleteInputError(f"missing moments: {', '.join(missing)}")


@dataclass(frozen=True)
class Stratum:
    """One stratum: sizes, means and central moments mu_pq (x power p, y power q).

    Central moments use divisor N_h.
    """

    label: str
    size: int
    sample_size: int
    mean_y: float
    mean_x: float
    central: Mapping[Index2, float]

    def __post_init__(self) -> None:
        if not 1 <= self.sample_size < self.size:
            raise DesignError(
                f"stratum '{self.label}': need 1 <= n_h < N_h, "
                f"got (n_h={self.sample_size}, N_h={self.size})"
            )

    @property
    def gamma(self) -> float:
        return (1.0 - self.sample_size / self.size) / self.sample_size

    @property
    def l1(self) -> float:
        N, n = self.size, self.sample_size
        return (N - n) / ((N - 1) * n)

    @property
    def k1(self) -> float:
        N, n = self.size, self.sample_size
        if N < 3:
            raise DesignError(f"stratum '{self.label}' needs N_h >= 3 for third-order terms")
        return (N - n) * (N - 2 * n) / ((N - 1) * (N - 2) * n**2)

    @property
    def k2(self) -> float:
        N, n = self.size, self.sample_size
        self._require_fourth_order()
        return (N - n) * (N**2 + N - 6 * n * N + 6 * n**2) / (
            (N - 1) * (N - 2) * (N - 3) * n**3
        )

    @property
    def k3(self) -> float:
        N, n = self.size, self.sample_size
        self._require_fourth_order()
        return N * (N - n) * (N - n - 1) * (n - 1) / (
            (N - 1) * (N - 2) * (N - 3) * n**3
        )

    def moment(self, p: int, q: int) -> float:
        if (p, q) == (0, 0):
            return 1.0
        if (p, q) in ((1, 0), (0, 1)):
            return 0.0
        try:
            return float(self.central[(p, q)])
        except KeyError:
            raise IncompleteInputError(
                f"stratum '{self.label}' has no central moment mu_{p}{q}"
            ) from None

    def _require_fourth_order(self) -> None:
        if self.size < 4:
            raise DesignError(f"stratum '{self.label}' needs N_h >= 4 for fourth-order terms")


@dataclass(frozen=True)
class StratifiedPopulation:
    """Strata of one population sampled by SRSWOR within each stratum."""

    strata: Tuple[Stratum, ...]

    def __post_init__(self) -> None:
        if not self.strata:
            raise DesignError("a stratified population needs at least one stratum")
        object.__setattr__(self, "strata", tuple(self.strata))

    @property
    def N(self) -> int:
        return sum(s.size for s in self.strata)

    @property
    def n(self) -> int:
        return sum(s.sample_size for s in self.strata)

    def weight(self, stratum: Stratum) -> float:
        return stratum.size / self.N

    @property
    def weights(self) -> Tuple[float, ...]:
        return tuple(self.weight(s) for s in self.strata)

    @property
    def mean_y(self) -> float:
        return sum(self.weight(s) * s.mean_y for s in self.strata)

    @property
    def mean_x(self) -> float:
        return sum(self.weight(s) * s.mean_x for s in self.strata)

    @classmethod
    def from_population(cls, population, allocation: Mapping[str, int]) -> "StratifiedPopulation":
        """Splits a labelled population into strata with the given sample sizes."""
        population.require("x", "stratum")
        labels = sorted(set(population.stratum))
        missing = [label for label in labels if label not in allocation]
        if missing:
            raise IncompleteInputError(f"allocation is missing strata: {', '.join(missing)}")
        extra = sorted(set(allocation) - set(labels))
        if extra:
            raise DesignError(f"allocation names unknown strata: {', '.join(extra)}")
        stratum = np.asarray(population.stratum)
        strata = []
        for label in labels:
            members = stratum == label
            x, y = population.x[members], population.y[members]
            dx, dy = x - x.mean(), y - y.mean()
            central = {
                (p, q): float(np.mean(dx**p * dy**q))
                for p in range(5)
                for q in range(5 - p)
                if p + q >= 2
            }
            strata.append(
                Stratum(
                    label=label,
                    size=int(members.sum()),
                    sample_size=int(allocation[label]),
                    mean_y=float(y.mean()),
                    mean_x=float(x.mean()),
                    central=central,
                )
            )
        return cls(tuple(strata))


# E[e0^a e1^b] keys, a the power of the y error and b of the x error
FIRST_ORDER_KEYS = ((2, 0), (0, 2), (1, 1))
SECOND_ORDER_KEYS = FIRST_ORDER_KEYS + ((1, 2), (0, 3), (2, 1), (1, 3), (0, 4), (2, 2))


@dataclass(frozen=True)
class ExpansionMoments:
    """Expectations E[e0^a e1^b] of the relative errors of the sample means.

    e0 = ybar/Y - 1 and e1 = xbar/X - 1; SRS and stratified designs both
    reduce to this table.
    """

    values: Mapping[Index2, float]
    design: str = "srswor"

    def get(self, a: int, b: int) -> float:
        try:
            return float(self.values[(a, b)])
        except KeyError:
            raise IncompleteInputError(
                f"expansion moment E[e0^{a} e1^{b}] is not available ({self.design})"
            ) from None

    def require(self, keys: Iterable[Index2]) -> None:
        missing = [f"({a},{b})" for a, b in keys if (a, b) not in self.values]
        if missing:
            raise IncompleteInputError(
                f"missing expansion moments (y power, x power): {', '.join(missing)}"
            )

    def first_order_only(self) -> "ExpansionMoments":
        """Copy with every third- and fourth-order expectation set to zero."""
        values: Dict[Index2, float] = {key: 0.0 for key in SECOND_ORDER_KEYS}
        for key in FIRST_ORDER_KEYS:
            values[key] = self.get(*key)
        return ExpansionMoments(values, self.design)
