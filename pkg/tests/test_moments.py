import numpy as np
import pytest

from managers.moment_manager import MomentManager
from managers.oracle_manager import OracleManager
from managers.population_manager import design_coefficients
from models.moment_model import (
    SECOND_ORDER_KEYS,
    MomentSource,
    MomentTable,
    PartialMomentTable,
    StratifiedPopulation,
)
from models.oracle_model import DesignKind, DesignSpec
from models.population_model import FinitePopulation
from utils.errors import (
    DegenerateMomentError,
    DesignError,
    DomainError,
    IncompleteInputError,
    SchemaError,
)


@pytest.fixture
def manager():
    return MomentManager()


class TestRelativeMoments:
    def test_second_order_definitions(self, manager, synthetic12):
        y, x = synthetic12.y, synthetic12.x
        assert manager.cpq(synthetic12, 0, 2) == pytest.approx(y.var() / y.mean() ** 2)
        assert manager.cpq(synthetic12, 2, 0) == pytest.approx(x.var() / x.mean() ** 2)
        covariance = np.mean((x - x.mean()) * (y - y.mean()))
        assert manager.cpq(synthetic12, 1, 1) == pytest.approx(covariance / (x.mean() * y.mean()))

    def test_table_is_raw_data(self, manager, synthetic12):
        table = manager.moment_table(synthetic12)
        assert table.source is MomentSource.RAW_DATA
        assert table.get(0, 0) == 1.0
        assert table.get(1, 0) == 0.0
        assert table.has(4, 0)
        assert not table.has(3, 2)

    def test_unchanged_by_rescaling(self, manager, synthetic12):
        rescaled = FinitePopulation(y=3.5 * synthetic12.y, x=0.02 * synthetic12.x)
        original, scaled = manager.moment_table(synthetic12), manager.moment_table(rescaled)
        for (p, q), value in original.entries.items():
            assert scaled.get(p, q) == pytest.approx(value, rel=1e-12, abs=1e-15), (p, q)

    def test_order_above_four(self, manager, synthetic12):
        with pytest.raises(DesignError):
            manager.cpq(synthetic12, 3, 2)

    def test_zero_mean(self, manager):
        population = FinitePopulation(y=[1.0, 2.0, 3.0], x=[-1.0, 0.0, 1.0])
        with pytest.raises(DegenerateMomentError, match="mean of 'x'"):
            manager.cpq(population, 2, 0)

    def test_missing_entry(self):
        table = MomentTable({(2, 0): 0.1, (0, 2): 0.2})
        with pytest.raises(IncompleteInputError, match="C_11"):
            table.get(1, 1)
        with pytest.raises(IncompleteInputError):
            table.require([(2, 0), (3, 1)])


class TestPartialMoments:
    def test_standardized_second_moments(self, manager, synthetic12):
        table = manager.partial_table(synthetic12)
        assert table.value(2, 0, 0) == pytest.approx(1.0)
        assert table.value(0, 2, 0) == pytest.approx(1.0)
        assert table.value(1, 1, 0) == pytest.approx(np.corrcoef(synthetic12.y, synthetic12.x)[0, 1])

    def test_unchanged_by_shift_and_scale(self, manager, synthetic12):
        moved = FinitePopulation(
            y=2.0 * synthetic12.y - 7.0, x=0.5 * synthetic12.x + 3.0, z=10.0 * synthetic12.z + 1.0
        )
        original, transformed = manager.partial_table(synthetic12), manager.partial_table(moved)
        for index, value in original.entries.items():
            assert transformed.value(*index) == pytest.approx(value, rel=1e-9, abs=1e-12), index

    @pytest.mark.parametrize("seed", range(5))
    def test_kurtosis_bound(self, manager, seed):
        rng = np.random.default_rng(seed)
        population = FinitePopulation(
            y=rng.lognormal(0.0, 1.0, 40), x=rng.uniform(1.0, 2.0, 40), z=rng.normal(5.0, 1.0, 40)
        )
        table = manager.partial_table(population)
        for index in ((4, 0, 0), (0, 4, 0), (0, 0, 4)):
            assert table.value(*index) >= 1.0

    def test_two_point_column_attains_kurtosis_bound(self, manager):
        population = FinitePopulation(y=[1.0, 3.0] * 5, x=np.arange(1.0, 11.0), z=np.arange(11.0, 1.0, -1.0))
        assert manager.partial_pqr(population, 4, 0, 0) == pytest.approx(1.0)

    def test_gaussian_kurtosis(self, manager):
        rng = np.random.default_rng(2024)
        population = FinitePopulation(
            y=rng.normal(50.0, 8.0, 200_000), x=rng.normal(20.0, 3.0, 200_000), z=rng.normal(0.0, 1.0, 200_000)
        )
        # standard error of the sample kurtosis is about sqrt(24 / N) = 0.011
        assert manager.partial_pqr(population, 4, 0, 0) == pytest.approx(3.0, abs=0.06)
        assert manager.partial_pqr(population, 0, 4, 0) == pytest.approx(3.0, abs=0.06)

    def test_starred(self, manager, synthetic12):
        table = manager.partial_table(synthetic12)
        assert table.starred(4, 0, 0) == pytest.approx(table.value(4, 0, 0) - 1.0)
        with pytest.raises(DomainError):
            table.starred(3, 1, 0)

    def test_from_central_moments(self, manager):
        central = {(2, 0, 0): 4.0, (0, 2, 0): 9.0, (0, 0, 2): 1.0, (1, 1, 0): 3.0, (4, 0, 0): 48.0}
        assert manager.partial_pqr(central, 1, 1, 0) == pytest.approx(0.5)
        assert manager.partial_pqr(central, 4, 0, 0, starred=True) == pytest.approx(2.0)
        with pytest.raises(IncompleteInputError):
            manager.partial_pqr(central, 0, 2, 2)

    def test_zero_second_moment(self, manager):
        population = FinitePopulation(y=[1.0, 2.0, 3.0], x=[1.0, 2.0, 4.0], z=[5.0, 5.0, 5.0])
        with pytest.raises(DegenerateMomentError, match="'z'"):
            manager.partial_pqr(population, 1, 0, 1)

    def test_needs_z(self, manager, pop2):
        population = FinitePopulation(y=pop2.y, x=pop2.x)
        with pytest.raises(SchemaError):
            manager.partial_table(population)

    def test_missing_starred_entries(self):
        table = PartialMomentTable({(4, 0, 0): 3.0})
        with pytest.raises(IncompleteInputError, match="d_040"):
            table.require_starred()


class TestExpansionMoments:
    def test_first_order_only_below_four_units(self, manager):
        population = FinitePopulation(y=[1.0, 2.0, 4.0], x=[2.0, 3.0, 7.0])
        moments = manager.expansion_moments(manager.moment_table(population), design_coefficients(3, 2))
        assert set(moments.values) == {(2, 0), (0, 2), (1, 1)}

    def test_second_order_keys(self, manager, synthetic12):
        moments = manager.expansion_moments(manager.moment_table(synthetic12), design_coefficients(12, 5))
        assert set(moments.values) == set(SECOND_ORDER_KEYS)

    def test_first_order_only_zeroes_higher_terms(self, manager, synthetic12):
        moments = manager.expansion_moments(manager.moment_table(synthetic12), design_coefficients(12, 5))
        first = moments.first_order_only()
        assert first.get(1, 3) == 0.0
        assert first.get(2, 0) == moments.get(2, 0)


class TestStratified:
    @pytest.fixture
    def stratified_population(self, synthetic12):
        labels = ("A",) * 5 + ("B",) * 7
        return FinitePopulation(y=synthetic12.y, x=synthetic12.x, stratum=labels)

    def test_from_population(self, stratified_population):
        strat = StratifiedPopulation.from_population(stratified_population, {"A": 2, "B": 3})
        assert strat.N == 12
        assert strat.n == 5
        assert sum(strat.weights) == pytest.approx(1.0)
        assert strat.mean_y == pytest.approx(stratified_population.y.mean())

    def test_allocation_must_cover_strata(self, stratified_population):
        with pytest.raises(IncompleteInputError, match="B"):
            StratifiedPopulation.from_population(stratified_population, {"A": 2})
        with pytest.raises(DesignError):
            StratifiedPopulation.from_population(stratified_population, {"A": 2, "B": 3, "C": 1})

    def test_stratum_needs_room(self, stratified_population):
        with pytest.raises(DesignError):
            StratifiedPopulation.from_population(stratified_population, {"A": 5, "B": 3})

    def test_variance_matches_enumeration(self, manager, stratified_population):
        allocation = {"A": 2, "B": 3}
        strat = StratifiedPopulation.from_population(stratified_population, allocation)
        spec = DesignSpec(kind=DesignKind.STRATIFIED, n=5, allocation=allocation)
        result = OracleManager().enumerate_design(
            stratified_population, spec, lambda draw: draw.stratified_mean("y") / strat.mean_y - 1.0,
            target=0.0,
        )
        assert result.mean == pytest.approx(0.0, abs=1e-12)
        assert manager.stratified_vrs(strat, 2, 0) == pytest.approx(result.mse, rel=1e-10)

    def test_cross_moment_matches_enumeration(self, manager, stratified_population):
        allocation = {"A": 2, "B": 3}
        strat = StratifiedPopulation.from_population(stratified_population, allocation)
        spec = DesignSpec(kind=DesignKind.STRATIFIED, n=5, allocation=allocation)

        def cross(draw):
            e0 = draw.stratified_mean("y") / strat.mean_y - 1.0
            e1 = draw.stratified_mean("x") / strat.mean_x - 1.0
            return e0 * e1

        result = OracleManager().enumerate_design(stratified_population, spec, cross, target=0.0)
        assert manager.stratified_vrs(strat, 1, 1) == pytest.approx(result.mean, rel=1e-10)

    def test_single_stratum_is_simple_random_sampling(self, manager, synthetic12):
        population = FinitePopulation(y=synthetic12.y, x=synthetic12.x, stratum=("A",) * 12)
        strat = StratifiedPopulation.from_population(population, {"A": 5})
        srs = manager.expansion_moments(manager.moment_table(synthetic12), design_coefficients(12, 5))
        for key in ((2, 0), (0, 2), (1, 1), (1, 2), (0, 3), (2, 1)):
            assert manager.stratified_vrs(strat, *key) == pytest.approx(srs.get(*key), rel=1e-12)

    def test_order_bounds(self, manager, stratified_population):
        strat = StratifiedPopulation.from_population(stratified_population, {"A": 2, "B": 3})
        with pytest.raises(DesignError):
            manager.stratified_vrs(strat, 3, 2)
