from itertools import product
from typing import Mapping, Union

import numpy as np

from models.moment_model import (
    FIRST_ORDER_KEYS,
    SECOND_ORDER_KEYS,
    ExpansionMoments,
    Index3,
    MomentSource,
    MomentTable,
    PartialMomentTable,
    StratifiedPopulation,
    Stratum,
)
from models.population_model import DesignCoefficients, FinitePopulation
from utils.errors import DegenerateMomentError, DesignError, IncompleteInputError
from utils.logger import configure_logger

logger = configure_logger(__name__)

PartialSource = Union[FinitePopulation, Mapping[Index3, float]]


class MomentManager:
    """Business logic for relative and standardized product moments.

    Central moments use divisor N throughout; with that choice the SRSWOR
    expectations of the relative errors are exact finite-population identities.
    """

    def cpq(self, pop: FinitePopulation, p: int, q: int) -> float:
        """C_pq = mu_pq / (meanX^p meanY^q), p the power of x and q of y."""
        if p < 0 or q < 0 or p + q > 4:
            raise DesignError(f"C_pq needs p, q >= 0 and p + q <= 4, got ({p}, {q})")
        pop.require("x")
        x, y = pop.x, pop.y
        mean_x, mean_y = float(x.mean()), float(y.mean())
        for name, mean, power in (("x", mean_x, p), ("y", mean_y, q)):
            if power and mean == 0.0:
                raise DegenerateMomentError(f"mean of '{name}' is zero; C_{p}{q} is undefined")
        mu = float(np.mean((x - mean_x) ** p * (y - mean_y) ** q))
        return mu / (mean_x**p * mean_y**q)

    def moment_table(self, pop: FinitePopulation) -> MomentTable:
        """Every C_pq with 2 <= p + q <= 4 computed from raw data."""
        entries = {
            (p, q): self.cpq(pop, p, q)
            for p in range(5)
            for q in range(5 - p)
            if p + q >= 2
        }
        entries[(1, 0)] = 0.0
        entries[(0, 1)] = 0.0
        logger.debug("moment table from %d units", pop.N)
        return MomentTable(entries, MomentSource.RAW_DATA)

    def partial_pqr(
        self, source: PartialSource, p: int, q: int, r: int, starred: bool = False
    ) -> float:
        """d_pqr = mu_pqr / (mu_200^(p/2) mu_020^(q/2) mu_002^(r/2)) for (y, x, z).

        ``source`` is a population with y, x and z or a mapping of central
        moments mu_pqr containing at least the three second moments.
        """
        mu = self._central_source(source)
        mu_y, mu_x, mu_z = mu((2, 0, 0)), mu((0, 2, 0)), mu((0, 0, 2))
        for name, second in (("y", mu_y), ("x", mu_x), ("z", mu_z)):
            if second <= 0.0:
                raise DegenerateMomentError(f"second moment of '{name}' is zero")
        value = mu((p, q, r)) / (mu_y ** (p / 2) * mu_x ** (q / 2) * mu_z ** (r / 2))
        return value - 1.0 if starred else value

    def partial_table(self, pop: FinitePopulation) -> PartialMomentTable:
        """Every d_pqr with p + q + r <= 4 computed from raw data."""
        pop.require("x", "z")
        entries = {
            (p, q, r): self.partial_pqr(pop, p, q, r)
            for p, q, r in product(range(5), repeat=3)
            if 2 <= p + q + r <= 4
        }
        return PartialMomentTable(entries, MomentSource.RAW_DATA)

    def stratified_vrs(self, strat: StratifiedPopulation, r: int, s: int) -> float:
        """Stratified V_rs, r the power of the y error and s of the x error.

        Second- and third-order terms are exact; fourth-order terms keep the
        within-stratum sums only.
        """
        order = r + s
        if not 2 <= order <= 4:
            raise DesignError(f"V_rs is defined for 2 <= r + s <= 4, got ({r}, {s})")
        scale = strat.mean_y**r * strat.mean_x**s
        if scale == 0.0:
            raise DegenerateMomentError(f"population mean is zero; V_{r}{s} is undefined")
        total = 0.0
        for stratum in strat.strata:
            weight = strat.weight(stratum)
            total += weight**order * self._stratum_expectation(stratum, r, s)
        return total / scale

    def expansion_moments(
        self, moments: MomentTable, coeffs: DesignCoefficients
    ) -> ExpansionMoments:
        """E[e0^a e1^b] under SRSWOR from C_pq and the coefficients L1..L4.

        Third- and fourth-order entries are only filled when every C_pq they
        need is available and N >= 4.
        """
        C = moments.get
        values = {
            (2, 0): coeffs.l1 * C(0, 2),
            (0, 2): coeffs.l1 * C(2, 0),
            (1, 1): coeffs.l1 * C(1, 1),
        }
        higher = ((3, 0), (1, 2), (2, 1), (4, 0), (3, 1), (2, 2), (0, 2))
        if coeffs.l3 is None or not all(moments.has(*pair) for pair in higher):
            logger.debug("expansion moments limited to first order")
            return ExpansionMoments(values)
        l2, l3, l4 = coeffs.l2, coeffs.l3, coeffs.l4
        values.update(
            {
                (1, 2): l2 * C(2, 1),
                (0, 3): l2 * C(3, 0),
                (2, 1): l2 * C(1, 2),
                (1, 3): l3 * C(3, 1) + 3.0 * l4 * C(2, 0) * C(1, 1),
                (0, 4): l3 * C(4, 0) + 3.0 * l4 * C(2, 0) ** 2,
                (2, 2): l3 * C(2, 2) + l4 * (C(2, 0) * C(0, 2) + 2.0 * C(1, 1) ** 2),
            }
        )
        return ExpansionMoments(values)

    def stratified_expansion_moments(self, strat: StratifiedPopulation) -> ExpansionMoments:
        """E[e0^a e1^b] of the stratified means as V_ab."""
        values = {}
        for a, b in SECOND_ORDER_KEYS:
            try:
                values[(a, b)] = self.stratified_vrs(strat, a, b)
            except (IncompleteInputError, DesignError) as error:
                if (a, b) in FIRST_ORDER_KEYS:
                    raise
                logger.debug("V_%d%d unavailable: %s", a, b, error.message)
        return ExpansionMoments(values, design="stratified")

    @staticmethod
    def _stratum_expectation(stratum: Stratum, r: int, s: int) -> float:
        """E[(ybar_h - Y_h)^r (xbar_h - X_h)^s] from the stratum central moments."""
        mu = stratum.moment
        order = r + s
        if order == 2:
            return stratum.l1 * mu(s, r)
        if order == 3:
            return stratum.k1 * mu(s, r)
        # polarized fourth moment: pairings of the four factors
        factors = ["y"] * r + ["x"] * s

        def second(u: str, v: str) -> float:
            return mu((u == "x") + (v == "x"), (u == "y") + (v == "y"))

        pairings = (
            second(factors[0], factors[1]) * second(factors[2], factors[3])
            + second(factors[0], factors[2]) * second(factors[1], factors[3])
            + second(factors[0], factors[3]) * second(factors[1], factors[2])
        )
        return stratum.k2 * mu(s, r) + stratum.k3 * pairings

    @staticmethod
    def _central_source(source: PartialSource):
        if isinstance(source, FinitePopulation):
            source.require("x", "z")
            dy = source.y - source.y.mean()
            dx = source.x - source.x.mean()
            dz = source.z - source.z.mean()
            return lambda index: float(np.mean(dy ** index[0] * dx ** index[1] * dz ** index[2]))

        def lookup(index: Index3) -> float:
            if sum(index) == 1:
                return 0.0
            try:
                return float(source[index])
            except KeyError:
                raise IncompleteInputError(
                    f"central moment mu_{''.join(map(str, index))} is not supplied"
                ) from None

        return lookup
