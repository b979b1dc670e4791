from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from utils.errors import DesignError, SchemaError

NUMERIC_COLUMNS = ("y", "x", "z")
ATTRIBUTE_COLUMNS = ("phi1", "phi2", "responder")
COLUMNS = NUMERIC_COLUMNS + ATTRIBUTE_COLUMNS + ("stratum",)


class Divisor(Enum):
    """Divisor used for population mean squares."""

    N = "n"
    N_MINUS_1 = "n-1"

    @property
    def ddof(self) -> int:
        return 0 if self is Divisor.N else 1


def _frozen_array(values, name: str, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    if array.ndim != 1:
        raise SchemaError(f"column '{name}' must be one-dimensional")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class FinitePopulation:
    """Ordered unit-level records of a finite population.

    Optional columns are either present for every unit or absent. Unit order
    matters to systematic sampling only.
    """

    y: np.ndarray
    x: Optional[np.ndarray] = None
    z: Optional[np.ndarray] = None
    phi1: Optional[np.ndarray] = None
    phi2: Optional[np.ndarray] = None
    responder: Optional[np.ndarray] = None
    stratum: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        y = _frozen_array(self.y, "y")
        if y.size < 2:
            raise SchemaError(f"a population needs N >= 2 units, got {y.size}")
        object.__setattr__(self, "y", y)
        for name in NUMERIC_COLUMNS + ATTRIBUTE_COLUMNS:
            values = getattr(self, name)
            if values is None:
                continue
            array = _frozen_array(values, name)
            if array.size != y.size:
                raise SchemaError(
                    f"column '{name}' has {array.size} values, expected {y.size}"
                )
            if not np.all(np.isfinite(array)):
                raise SchemaError(f"column '{name}' contains non-finite values")
            if name in ATTRIBUTE_COLUMNS and not np.all((array == 0) | (array == 1)):
                raise SchemaError(f"attribute column '{name}' must contain only 0 or 1")
            object.__setattr__(self, name, array)
        if not np.all(np.isfinite(y)):
            raise SchemaError("column 'y' contains non-finite values")
        if self.stratum is not None:
            labels = tuple(str(label) for label in self.stratum)
            if len(labels) != y.size:
                raise SchemaError(
                    f"column 'stratum' has {len(labels)} values, expected {y.size}"
                )
            object.__setattr__(self, "stratum", labels)

    @property
    def N(self) -> int:
        return int(self.y.size)

    def has(self, name: str) -> bool:
        return getattr(self, name, None) is not None

    def column(self, name: str) -> np.ndarray:
        """Returns a numeric or attribute column, raising if it is absent."""
        if name not in NUMERIC_COLUMNS + ATTRIBUTE_COLUMNS:
            raise SchemaError(f"unknown column '{name}'")
        values = getattr(self, name)
        if values is None:
            raise SchemaError(f"population has no '{name}' column")
        return values

    def require(self, *names: str) -> None:
        missing = [name for name in names if not self.has(name)]
        if missing:
            raise SchemaError(f"population is missing columns: {', '.join(missing)}")

    def reordered(self, order: Iterable[int]) -> "FinitePopulation":
        """Same units in a new order."""
        index = np.asarray(list(order), dtype=int)
        if sorted(index.tolist()) != list(range(self.N)):
            raise SchemaError("reordering must be a permutation of the units")
        values = {}
        for f in fields(self):
            column = getattr(self, f.name)
            if column is None:
                values[f.name] = None
            elif f.name == "stratum":
                values[f.name] = tuple(column[i] for i in index)
            else:
                values[f.name] = column[index]
        return FinitePopulation(**values)

    @classmethod
    def from_records(cls, records: List[Mapping[str, object]]) -> "FinitePopulation":
        """Builds a population from a list of per-unit mappings."""
        if not records:
            raise SchemaError("no records supplied")
        present = [name for name in COLUMNS if name in records[0]]
        if "y" not in present:
            raise SchemaError("every record must supply y")
        columns: Dict[str, list] = {name: [] for name in present}
        for row, record in enumerate(records, start=1):
            if set(present) != {name for name in COLUMNS if name in record}:
                raise SchemaError(f"record {row} does not supply the same columns")
            for name in present:
                columns[name].append(record[name])
        if "stratum" in columns:
            columns["stratum"] = tuple(columns["stratum"])
        return cls(**columns)


@dataclass(frozen=True)
class SummaryStats:
    """Population means, mean squares, covariances, correlations and CVs."""

    N: int
    mean_y: float
    var_y: float
    cv_y: float
    divisor: Divisor = Divisor.N_MINUS_1
    mean_x: Optional[float] = None
    mean_z: Optional[float] = None
    var_x: Optional[float] = None
    var_z: Optional[float] = None
    cov_yx: Optional[float] = None
    cov_yz: Optional[float] = None
    cov_zx: Optional[float] = None
    rho_yx: Optional[float] = None
    rho_yz: Optional[float] = None
    rho_zx: Optional[float] = None
    cv_x: Optional[float] = None
    cv_z: Optional[float] = None
    ratio_r1: Optional[float] = None
    ratio_r2: Optional[float] = None
    source: str = "raw-data"

    @classmethod
    def from_published(
        cls,
        N: int,
        mean_y: float,
        var_y: float,
        mean_x: Optional[float] = None,
        var_x: Optional[float] = None,
        mean_z: Optional[float] = None,
        var_z: Optional[float] = None,
        rho_yx: Optional[float] = None,
        rho_yz: Optional[float] = None,
        rho_zx: Optional[float] = None,
        divisor: Divisor = Divisor.N_MINUS_1,
    ) -> "SummaryStats":
        """Summary built from printed means, mean squares and correlations."""

        def cov(rho, var_a, var_b):
            if rho is None or var_a is None or var_b is None:
                return None
            return rho * np.sqrt(var_a * var_b)

        def cv(var, mean):
            if var is None or mean is None or mean == 0:
                return None
            return float(np.sqrt(var) / abs(mean))

        return cls(
            N=N,
            mean_y=mean_y,
            var_y=var_y,
            cv_y=cv(var_y, mean_y),
            divisor=divisor,
            mean_x=mean_x,
            mean_z=mean_z,
            var_x=var_x,
            var_z=var_z,
            cov_yx=cov(rho_yx, var_y, var_x),
            cov_yz=cov(rho_yz, var_y, var_z),
            cov_zx=cov(rho_zx, var_z, var_x),
            rho_yx=rho_yx,
            rho_yz=rho_yz,
            rho_zx=rho_zx,
            cv_x=cv(var_x, mean_x),
            cv_z=cv(var_z, mean_z),
            ratio_r1=mean_y / mean_x if mean_x else None,
            ratio_r2=mean_y / mean_z if mean_z else None,
            source="published",
        )


@dataclass(frozen=True)
class AttributeSummary:
    """Study variable summary with two auxiliary attributes."""

    N: int
    mean_y: float
    var_y: float
    p1: float
    p2: float
    var_phi1: float
    var_phi2: float
    rho_pb1: float
    rho_pb2: float
    rho_phi: float
    cov_y_phi1: Optional[float] = None
    cov_y_phi2: Optional[float] = None
    cov_phi1_phi2: Optional[float] = None
    divisor: Divisor = Divisor.N_MINUS_1
    source: str = "raw-data"

    @property
    def cv_y(self) -> float:
        return float(np.sqrt(self.var_y) / abs(self.mean_y))

    @property
    def cv_p1(self) -> float:
        return float(np.sqrt(self.var_phi1) / self.p1)

    @property
    def cv_p2(self) -> float:
        return float(np.sqrt(self.var_phi2) / self.p2)

    @property
    def k_pb1(self) -> float:
        return self.rho_pb1 * self.cv_y / self.cv_p1

    @property
    def k_pb2(self) -> float:
        return self.rho_pb2 * self.cv_y / self.cv_p2

    @property
    def k_phi(self) -> float:
        return self.rho_phi * self.cv_p1 / self.cv_p2


@dataclass(frozen=True)
class DesignCoefficients:
    """Sampling fractions and SRSWOR product-moment coefficients.

    ``lemma_overrides`` fixes any of ``l1``..``l4`` to a given value, e.g. to
    zero every higher-order term.
    """

    N: int
    n: int
    n_prime: Optional[int] = None
    gamma_h: Optional[Tuple[float, ...]] = None
    lemma_overrides: Mapping[str, float] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not 2 <= self.n < self.N:
            raise DesignError(f"need 2 <= n < N, got (n={self.n}, N={self.N})")
        if self.n_prime is not None and not self.n < self.n_prime < self.N:
            raise DesignError(
                f"need n < n' < N, got (n={self.n}, n'={self.n_prime}, N={self.N})"
            )
        unknown = set(self.lemma_overrides) - {"l1", "l2", "l3", "l4"}
        if unknown:
            raise DesignError(f"unknown lemma coefficients: {sorted(unknown)}")

    @property
    def f(self) -> float:
        return self.n / self.N

    @property
    def lam(self) -> float:
        return (1.0 - self.f) / self.n

    @property
    def f1(self) -> float:
        return 1.0 / self.n - 1.0 / self.N

    @property
    def g(self) -> float:
        return self.n / (self.N - self.n)

    @property
    def l1(self) -> float:
        N, n = self.N, self.n
        return self.lemma_overrides.get("l1", (N - n) / ((N - 1) * n))

    @property
    def l2(self) -> float:
        N, n = self.N, self.n
        return self.lemma_overrides.get(
            "l2", (N - n) * (N - 2 * n) / ((N - 1) * (N - 2) * n**2)
        )

    @property
    def l3(self) -> Optional[float]:
        """None when N < 4."""
        if "l3" in self.lemma_overrides:
            return self.lemma_overrides["l3"]
        N, n = self.N, self.n
        if N < 4:
            return None
        return (N - n) * (N**2 + N - 6 * n * N + 6 * n**2) / (
            (N - 1) * (N - 2) * (N - 3) * n**3
        )

    @property
    def l4(self) -> Optional[float]:
        """None when N < 4."""
        if "l4" in self.lemma_overrides:
            return self.lemma_overrides["l4"]
        N, n = self.N, self.n
        if N < 4:
            return None
        return N * (N - n) * (N - n - 1) * (n - 1) / (
            (N - 1) * (N - 2) * (N - 3) * n**3
        )

    def with_lemmas(self, **values: float) -> "DesignCoefficients":
        """Copy with some of l1..l4 fixed to the given values."""
        return replace(self, lemma_overrides={**self.lemma_overrides, **values})
