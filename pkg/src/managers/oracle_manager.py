from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from itertools import combinations, islice, product
from math import comb, fsum, prod, sqrt
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from managers.moment_manager import MomentManager
from managers.systematic_manager import SystematicManager
from models.oracle_model import (
    DEFAULT_ENUMERATION_CAP,
    DesignKind,
    DesignSpec,
    Draw,
    HansenHurwitzDraw,
    IdentityCheck,
    SimulationResult,
)
from models.population_model import DesignCoefficients, FinitePopulation
from utils.errors import DesignError, EnumerationTooLargeError, UnknownIdentifierError
from utils.logger import configure_logger

logger = configure_logger(__name__)

EstimatorFn = Callable[[Draw], float]

BLOCK_SIZE = 1_000
CHUNK_SIZE = 50_000


def _pop_mean(draw: Draw, column: str) -> float:
    return float(draw.population.column(column).mean())


def _dual(draw: Draw) -> float:
    N, n = draw.population.N, draw.n
    X = _pop_mean(draw, "x")
    return draw.mean("y") * (N * X - n * draw.mean("x")) / ((N - n) * X)


STANDARD_ESTIMATORS: Dict[str, EstimatorFn] = {
    "mean": lambda draw: draw.mean("y"),
    "ratio": lambda draw: draw.mean("y") * _pop_mean(draw, "x") / draw.mean("x"),
    "product": lambda draw: draw.mean("y") * draw.mean("x") / _pop_mean(draw, "x"),
    "dual": _dual,
    "dual-x": lambda draw: (
        draw.population.N * _pop_mean(draw, "x") - draw.n * draw.mean("x")
    ) / (draw.population.N - draw.n),
    "two-phase-ratio": lambda draw: draw.mean("y") * draw.first_phase_mean("x") / draw.mean("x"),
    "stratified-mean": lambda draw: draw.stratified_mean("y"),
    "sample-variance": lambda draw: draw.variance("y"),
}


def standard_estimator(estimator_id: str) -> EstimatorFn:
    try:
        return STANDARD_ESTIMATORS[estimator_id]
    except KeyError:
        known = ", ".join(sorted(STANDARD_ESTIMATORS))
        raise UnknownIdentifierError(f"unknown estimator '{estimator_id}' (known: {known})") from None


def factor_type_estimator(alpha: float) -> EstimatorFn:
    """T(alpha) on the follow-up mean, with f = n/N of the draw."""
    systematic = SystematicManager()

    def estimate(draw: Draw) -> float:
        return systematic.factor_point(
            draw.mean("y"), draw.mean("x"), _pop_mean(draw, "x"), alpha, draw.n / draw.population.N
        )

    return estimate


def enumerate_sample_means(
    population: FinitePopulation,
    n: int,
    columns: Sequence[str] = ("y", "x"),
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Dict[str, np.ndarray]:
    """Sample means of each column over every SRSWOR sample, in lexicographic order."""
    count = comb(population.N, n)
    if count > cap:
        raise EnumerationTooLargeError(
            f"C({population.N}, {n}) = {count} samples exceeds the cap of {cap}; use Monte Carlo"
        )
    values = {column: population.column(column) for column in columns}
    means: Dict[str, List[np.ndarray]] = {column: [] for column in columns}
    subsets = combinations(range(population.N), n)
    while True:
        chunk = np.array(list(islice(subsets, CHUNK_SIZE)), dtype=int)
        if chunk.size == 0:
            break
        for column in columns:
            means[column].append(values[column][chunk].mean(axis=1))
    return {column: np.concatenate(parts) for column, parts in means.items()}


class OracleManager:
    """Business logic for exact and simulated sampling distributions of estimators.

    Monte-Carlo replicates run in fixed-size blocks; block ``b`` draws from its
    own stream ``SeedSequence(seed, spawn_key=(b,))`` so the worker count never
    changes the result.
    """

    def __init__(self, workers: int = 1, block_size: int = BLOCK_SIZE) -> None:
        if workers < 1 or block_size < 1:
            raise DesignError("workers and block size must be positive")
        self.workers = workers
        self.block_size = block_size

    def enumerate_design(
        self,
        population: FinitePopulation,
        spec: DesignSpec,
        estimator: EstimatorFn,
        estimator_id: str = "estimator",
        target: Optional[float] = None,
    ) -> SimulationResult:
        """Exact mean, bias and MSE over every sample the design can select.

        With a non-response follow-up every subsample of each sample's
        non-respondents is enumerated too, weighted 1/C(n2, h2) within its
        sample; ``count`` is then the number of (sample, subsample) outcomes.
        """
        spec.validate_for(population)
        draws = self._all_draws(population, spec)
        if spec.nonresponse is None:
            values = [float(estimator(draw)) for draw in draws]
            logger.debug("enumerated %d samples for %s", len(values), estimator_id)
            return self._summarize(values, self._target(population, target), estimator_id, exact=True)
        values, weights = [], []
        for draw in draws:
            for outcome, weight in self._follow_ups(population, spec, draw):
                values.append(float(estimator(outcome)))
                weights.append(weight)
            self._check_cap(len(values), spec.enumeration_cap)
        logger.debug("enumerated %d follow-up outcomes for %s", len(values), estimator_id)
        return self._summarize(
            values, self._target(population, target), estimator_id, exact=True, weights=weights
        )

    def monte_carlo(
        self,
        population: FinitePopulation,
        spec: DesignSpec,
        estimator: EstimatorFn,
        estimator_id: str = "estimator",
        target: Optional[float] = None,
    ) -> SimulationResult:
        """Empirical mean, bias and MSE over seeded replicates."""
        spec.validate_for(population)
        blocks = [
            (block, min(self.block_size, spec.replicates - block * self.block_size))
            for block in range(-(-spec.replicates // self.block_size))
        ]

        def run(job) -> List[float]:
            block, size = job
            rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(block,)))
            return [float(estimator(self._draw(population, spec, rng))) for _ in range(size)]

        if self.workers == 1:
            results = [run(job) for job in blocks]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                results = list(executor.map(run, blocks))
        values = [value for block in results for value in block]
        logger.info("%s: %d replicates, seed %d", estimator_id, len(values), spec.seed)
        return self._summarize(values, self._target(population, target), estimator_id, exact=False)

    def hansen_hurwitz_draw(
        self,
        sample_units: np.ndarray,
        responder_flags: np.ndarray,
        big_l: float,
        rng: np.random.Generator,
        values: np.ndarray,
    ) -> HansenHurwitzDraw:
        """Follows up a 1/L subsample of the sample's non-respondents.

        ``responder_flags`` and ``values`` are population columns indexed by unit.
        """
        if big_l <= 1.0:
            raise DesignError(f"L must exceed 1, got {big_l}")
        units = np.asarray(sample_units, dtype=int)
        responding = responder_flags[units] == 1
        respondents, nonrespondents = units[responding], units[~responding]
        n1, n2 = int(respondents.size), int(nonrespondents.size)
        if n2 == 0:
            return HansenHurwitzDraw(float(values[units].mean()), n1, 0, 0)
        h2 = self.follow_up_size(n2, big_l)
        followed = np.sort(rng.choice(nonrespondents, size=h2, replace=False))
        return HansenHurwitzDraw(
            self._follow_up_mean(values, respondents, followed, n2), n1, n2, h2, followed
        )

    @staticmethod
    def follow_up_size(n2: int, big_l: float) -> int:
        """h2 = max(1, round(n2/L)), halves rounded up; 0 when nobody is missing."""
        if n2 == 0:
            return 0
        return max(1, int(np.floor(n2 / big_l + 0.5)))

    def verify_moment_identities(
        self, population: FinitePopulation, n: int, cap: int = DEFAULT_ENUMERATION_CAP
    ) -> List[IdentityCheck]:
        """Closed-form SRSWOR moments of the relative errors against full enumeration."""
        if population.N < 4:
            raise DesignError(f"fourth-order identities need N >= 4, got {population.N}")
        population.require("x")
        coeffs = DesignCoefficients(N=population.N, n=n)
        table = MomentManager().moment_table(population)
        C = table.get
        means = enumerate_sample_means(population, n, ("y", "x"), cap)
        e0 = means["y"] / population.y.mean() - 1.0
        e1 = means["x"] / population.x.mean() - 1.0
        l1, l2, l3, l4 = coeffs.l1, coeffs.l2, coeffs.l3, coeffs.l4
        identities = (
            ("E[e0]", e0, 0.0),
            ("E[e1]", e1, 0.0),
            ("E[e0^2] = L1 C02", e0**2, l1 * C(0, 2)),
            ("E[e1^2] = L1 C20", e1**2, l1 * C(2, 0)),
            ("E[e0 e1] = L1 C11", e0 * e1, l1 * C(1, 1)),
            ("E[e1^2 e0] = L2 C21", e1**2 * e0, l2 * C(2, 1)),
            ("E[e1^3] = L2 C30", e1**3, l2 * C(3, 0)),
            ("E[e1^3 e0] = L3 C31 + 3 L4 C20 C11", e1**3 * e0, l3 * C(3, 1) + 3 * l4 * C(2, 0) * C(1, 1)),
            ("E[e1^4] = L3 C40 + 3 L4 C20^2", e1**4, l3 * C(4, 0) + 3 * l4 * C(2, 0) ** 2),
            (
                "E[e1^2 e0^2] = L3 C22 + L4 (C20 C02 + 2 C11^2)",
                e1**2 * e0**2,
                l3 * C(2, 2) + l4 * (C(2, 0) * C(0, 2) + 2 * C(1, 1) ** 2),
            ),
        )
        checks = []
        for name, terms, analytic in identities:
            enumerated = fsum(terms.tolist()) / terms.size
            difference = abs(analytic - enumerated)
            # identities that vanish are compared absolutely
            rel_diff = difference / max(abs(analytic), abs(enumerated)) if analytic != 0.0 else difference
            checks.append(IdentityCheck(name, analytic, enumerated, rel_diff))
        return checks

    def _all_draws(self, population: FinitePopulation, spec: DesignSpec) -> Iterator[Draw]:
        N, n, cap = population.N, spec.n, spec.enumeration_cap
        if spec.kind is DesignKind.SYSTEMATIC:
            k = spec.k or N // n
            for start in range(k):
                yield Draw(population, start + k * np.arange(n))
            return
        if spec.kind in (DesignKind.SRSWOR, DesignKind.SRSWOR_NONRESPONSE):
            self._check_cap(comb(N, n), cap)
            for units in combinations(range(N), n):
                yield Draw(population, np.array(units))
            return
        if spec.kind is DesignKind.TWO_PHASE:
            self._check_cap(comb(N, spec.n_prime) * comb(spec.n_prime, n), cap)
            for first in combinations(range(N), spec.n_prime):
                first_units = np.array(first)
                for second in combinations(first, n):
                    yield Draw(population, np.array(second), first_phase=first_units)
            return
        if spec.kind is DesignKind.STRATIFIED:
            groups = self._strata(population, spec)
            self._check_cap(prod(comb(len(units), size) for _, units, size in groups), cap)
            choices = [combinations(units, size) for _, units, size in groups]
            for picked in product(*choices):
                strata_units = tuple(
                    (weight, np.array(units)) for (weight, _, _), units in zip(groups, picked)
                )
                yield Draw(
                    population,
                    np.concatenate([units for _, units in strata_units]),
                    strata_units=strata_units,
                )
            return
        raise DesignError(f"{spec.kind.value} cannot be enumerated")

    def _follow_ups(
        self, population: FinitePopulation, spec: DesignSpec, draw: Draw
    ) -> Iterator[Tuple[Draw, float]]:
        """Every follow-up subsample of one sample, with its probability given the sample."""
        units = draw.units
        responding = population.column(spec.nonresponse.responder_column)[units] == 1
        respondents, nonrespondents = units[responding], units[~responding]
        n2 = int(nonrespondents.size)
        if n2 == 0:
            yield replace(draw, ybar_star=float(population.y[units].mean())), 1.0
            return
        h2 = self.follow_up_size(n2, spec.nonresponse.big_l)
        weight = 1.0 / comb(n2, h2)
        for followed in combinations(nonrespondents.tolist(), h2):
            ybar_star = self._follow_up_mean(population.y, respondents, np.array(followed), n2)
            yield replace(draw, ybar_star=ybar_star), weight

    @staticmethod
    def _follow_up_mean(
        values: np.ndarray, respondents: np.ndarray, followed: np.ndarray, n2: int
    ) -> float:
        """(n1 ybar_1 + n2 ybar_h2) / n."""
        n1 = int(respondents.size)
        total = n1 * float(values[respondents].mean()) if n1 else 0.0
        total += n2 * float(values[followed].mean())
        return total / (n1 + n2)

    def _draw(self, population: FinitePopulation, spec: DesignSpec, rng: np.random.Generator) -> Draw:
        N, n = population.N, spec.n
        if spec.kind is DesignKind.SYSTEMATIC:
            k = spec.k or N // n
            units = int(rng.integers(k)) + k * np.arange(n)
        elif spec.kind is DesignKind.TWO_PHASE:
            first = np.sort(rng.choice(N, size=spec.n_prime, replace=False))
            second = np.sort(rng.choice(first, size=n, replace=False))
            return Draw(population, second, first_phase=first)
        elif spec.kind is DesignKind.STRATIFIED:
            strata_units = tuple(
                (weight, np.sort(rng.choice(units, size=size, replace=False)))
                for weight, units, size in self._strata(population, spec)
            )
            return Draw(
                population,
                np.concatenate([units for _, units in strata_units]),
                strata_units=strata_units,
            )
        else:
            units = np.sort(rng.choice(N, size=n, replace=False))
        if spec.nonresponse is None:
            return Draw(population, units)
        follow_up = self.hansen_hurwitz_draw(
            units,
            population.column(spec.nonresponse.responder_column),
            spec.nonresponse.big_l,
            rng,
            population.y,
        )
        return Draw(population, units, ybar_star=follow_up.ybar_star)

    @staticmethod
    def _strata(population: FinitePopulation, spec: DesignSpec):
        labels = np.array(population.stratum)
        groups = []
        for label in sorted(set(population.stratum)):
            if label not in spec.allocation:
                raise DesignError(f"allocation has no sample size for stratum '{label}'")
            units = np.flatnonzero(labels == label)
            size = spec.allocation[label]
            if not 1 <= size <= units.size:
                raise DesignError(f"stratum '{label}' needs 1 <= n_h <= {units.size}, got {size}")
            groups.append((units.size / population.N, units, size))
        extra = set(spec.allocation) - set(population.stratum)
        if extra:
            raise DesignError(f"allocation names unknown strata: {sorted(extra)}")
        return groups

    @staticmethod
    def _check_cap(count: int, cap: int) -> None:
        if count > cap:
            raise EnumerationTooLargeError(
                f"{count} samples exceeds the enumeration cap of {cap}; use Monte Carlo"
            )

    @staticmethod
    def _target(population: FinitePopulation, target: Optional[float]) -> float:
        return float(population.y.mean()) if target is None else target

    @staticmethod
    def _summarize(
        values: Iterable[float],
        target: float,
        estimator_id: str,
        exact: bool,
        weights: Optional[Sequence[float]] = None,
    ) -> SimulationResult:
        values = list(values)
        count = len(values)
        squared = [(value - target) ** 2 for value in values]
        if weights is None:
            mean = fsum(values) / count
            mse = fsum(squared) / count
        else:
            total = fsum(weights)
            mean = fsum(w * value for w, value in zip(weights, values)) / total
            mse = fsum(w * sq for w, sq in zip(weights, squared)) / total
        if exact or count < 2:
            mc_error = mse_error = 0.0
        else:
            spread = fsum((value - mean) ** 2 for value in values) / (count - 1)
            mse_spread = fsum((sq - mse) ** 2 for sq in squared) / (count - 1)
            mc_error, mse_error = sqrt(spread / count), sqrt(mse_spread / count)
        return SimulationResult(
            estimator_id=estimator_id,
            mean=mean,
            bias=mean - target,
            mse=mse,
            mc_std_error=mc_error,
            mse_std_error=mse_error,
            count=count,
            exact=exact,
            target=target,
        )
