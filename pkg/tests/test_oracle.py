import numpy as np
import pytest

from managers.oracle_manager import OracleManager, enumerate_sample_means, standard_estimator
from models.oracle_model import DesignKind, DesignSpec, NonResponseDesign
from models.population_model import FinitePopulation
from utils.errors import (
    DesignError,
    EnumerationTooLargeError,
    SchemaError,
    UnknownIdentifierError,
)


@pytest.fixture
def oracle():
    return OracleManager()


def srswor(n, **options):
    return DesignSpec(kind=DesignKind.SRSWOR, n=n, **options)


class TestMomentIdentities:
    @pytest.mark.parametrize("n", [2, 5, 9])
    def test_identities_hold_exactly(self, oracle, synthetic12, n):
        checks = oracle.verify_moment_identities(synthetic12, n)
        assert len(checks) == 10
        for check in checks:
            assert check.rel_diff < 1e-10, check.identity

    def test_relative_difference_scales_by_larger_side(self, oracle, synthetic12):
        for check in oracle.verify_moment_identities(synthetic12, 5):
            difference = abs(check.analytic - check.enumerated)
            if check.analytic == 0.0:
                assert check.rel_diff == difference, check.identity
            else:
                larger = max(abs(check.analytic), abs(check.enumerated))
                assert check.rel_diff == pytest.approx(difference / larger), check.identity

    def test_needs_four_units(self, oracle):
        population = FinitePopulation(y=[1.0, 2.0, 4.0], x=[2.0, 3.0, 5.0])
        with pytest.raises(DesignError):
            oracle.verify_moment_identities(population, 2)

    def test_sample_means_in_lexicographic_order(self, pop2):
        means = enumerate_sample_means(pop2, 9)
        assert means["y"].size == 10
        assert means["y"][0] == pytest.approx(pop2.y[:9].mean())


class TestEnumeration:
    def test_sample_mean_is_unbiased(self, oracle, pop2):
        result = oracle.enumerate_design(pop2, srswor(4), standard_estimator("mean"), "mean")
        assert result.count == 210
        assert result.exact
        assert result.bias == pytest.approx(0.0, abs=1e-12)
        assert result.mse == pytest.approx(0.15 * 66.0)
        assert result.mc_std_error == 0.0

    def test_dual_transform_of_x(self, oracle, pop2):
        result = oracle.enumerate_design(pop2, srswor(4), standard_estimator("dual-x"), "dual-x", target=42.0)
        assert result.mean == pytest.approx(42.0)
        assert result.mse == pytest.approx((4.0 / 6.0) ** 2 * 0.15 * 30.0)

    def test_sample_variance_is_unbiased(self, oracle, pop2):
        result = oracle.enumerate_design(
            pop2, srswor(4), standard_estimator("sample-variance"), target=66.0
        )
        assert result.bias == pytest.approx(0.0, abs=1e-9)

    def test_two_phase_mean(self, oracle, pop2):
        spec = DesignSpec(kind=DesignKind.TWO_PHASE, n=2, n_prime=5)
        result = oracle.enumerate_design(pop2, spec, standard_estimator("mean"))
        assert result.count == 252 * 10
        assert result.bias == pytest.approx(0.0, abs=1e-12)

    def test_systematic_samples(self, oracle, systematic48):
        spec = DesignSpec(kind=DesignKind.SYSTEMATIC, n=6)
        result = oracle.enumerate_design(systematic48, spec, standard_estimator("mean"))
        assert result.count == 8
        assert result.bias == pytest.approx(0.0, abs=1e-9)

    def test_cap(self, oracle, pop2):
        with pytest.raises(EnumerationTooLargeError):
            oracle.enumerate_design(pop2, srswor(4, enumeration_cap=100), standard_estimator("mean"))

    def test_follow_up_outcomes_by_hand(self, oracle):
        population = FinitePopulation(y=[1.0, 2.0, 3.0, 4.0], responder=[1.0, 0.0, 0.0, 1.0])
        spec = DesignSpec(kind=DesignKind.SRSWOR_NONRESPONSE, n=2, nonresponse=NonResponseDesign(2.0))
        result = oracle.enumerate_design(population, spec, standard_estimator("mean"), "mean")
        # units 1 and 2 together leave one of them to follow up, each with probability 1/2
        assert result.count == 7
        assert result.mean == pytest.approx(2.5, rel=1e-14)
        assert result.mse == pytest.approx(11.0 / 24.0, rel=1e-14)

    def test_follow_up_mean_is_unbiased(self, oracle, systematic48):
        spec = DesignSpec(kind=DesignKind.SYSTEMATIC, n=6, k=8, nonresponse=NonResponseDesign(2.0))
        result = oracle.enumerate_design(systematic48, spec, standard_estimator("mean"), "mean")
        assert result.exact
        assert result.count > 8
        assert result.bias == pytest.approx(0.0, abs=1e-9)

    def test_follow_up_enumeration_cap(self, oracle, systematic48):
        spec = DesignSpec(
            kind=DesignKind.SYSTEMATIC, n=6, k=8, nonresponse=NonResponseDesign(2.0), enumeration_cap=8
        )
        with pytest.raises(EnumerationTooLargeError):
            oracle.enumerate_design(systematic48, spec, standard_estimator("mean"))


class TestMonteCarlo:
    def test_hansen_hurwitz_is_unbiased(self, systematic48):
        spec = DesignSpec(
            kind=DesignKind.SYSTEMATIC,
            n=6,
            k=8,
            nonresponse=NonResponseDesign(2.0),
            seed=42,
            replicates=100_000,
        )
        result = OracleManager().monte_carlo(systematic48, spec, standard_estimator("mean"), "mean")
        assert result.count == 100_000
        assert not result.exact
        assert abs(result.bias) < 3 * result.mc_std_error

    def test_mse_agrees_with_enumeration(self, pop2):
        spec = srswor(4, seed=3, replicates=20_000)
        result = OracleManager().monte_carlo(pop2, spec, standard_estimator("mean"))
        assert abs(result.mse - 0.15 * 66.0) < 5 * result.mse_std_error

    def test_same_seed_same_result(self, pop2):
        spec = srswor(4, seed=11, replicates=2_500)
        first = OracleManager().monte_carlo(pop2, spec, standard_estimator("ratio"))
        second = OracleManager().monte_carlo(pop2, spec, standard_estimator("ratio"))
        assert first == second

    def test_workers_do_not_change_result(self, pop2):
        spec = srswor(4, seed=11, replicates=2_500)
        serial = OracleManager(workers=1).monte_carlo(pop2, spec, standard_estimator("ratio"))
        parallel = OracleManager(workers=3).monte_carlo(pop2, spec, standard_estimator("ratio"))
        assert serial == parallel

    def test_seeds_differ(self, pop2):
        first = OracleManager().monte_carlo(pop2, srswor(4, seed=1, replicates=500), standard_estimator("mean"))
        second = OracleManager().monte_carlo(pop2, srswor(4, seed=2, replicates=500), standard_estimator("mean"))
        assert first.mean != second.mean


class TestHansenHurwitz:
    def test_full_response(self, oracle):
        values = np.array([1.0, 2.0, 3.0, 4.0])
        draw = oracle.hansen_hurwitz_draw(
            np.array([0, 2]), np.ones(4), 2.0, np.random.default_rng(0), values
        )
        assert draw.ybar_star == pytest.approx(2.0)
        assert (draw.n1, draw.n2, draw.h2) == (2, 0, 0)

    def test_follow_up_size_rounds_half_up(self, oracle):
        values = np.arange(10, dtype=float)
        flags = np.array([1, 0, 0, 0, 1, 1, 1, 1, 1, 1], dtype=float)
        draw = oracle.hansen_hurwitz_draw(
            np.array([0, 1, 2, 3]), flags, 2.0, np.random.default_rng(0), values
        )
        assert (draw.n1, draw.n2, draw.h2) == (1, 3, 2)
        assert set(draw.followed_up) <= {1, 2, 3}
        expected = (1 * 0.0 + 3 * values[draw.followed_up].mean()) / 4
        assert draw.ybar_star == pytest.approx(expected)

    def test_follow_up_at_least_one(self, oracle):
        flags = np.array([1, 0, 1, 1], dtype=float)
        draw = oracle.hansen_hurwitz_draw(
            np.array([0, 1, 2, 3]), flags, 5.0, np.random.default_rng(0), np.arange(4, dtype=float)
        )
        assert draw.h2 == 1
        assert draw.ybar_star == pytest.approx(1.5)

    def test_rejects_small_l(self, oracle):
        with pytest.raises(DesignError):
            oracle.hansen_hurwitz_draw(
                np.array([0]), np.ones(2), 1.0, np.random.default_rng(0), np.ones(2)
            )


class TestDesignSpec:
    def test_nonresponse_design_needs_follow_up(self):
        with pytest.raises(DesignError):
            DesignSpec(kind=DesignKind.SRSWOR_NONRESPONSE, n=4)

    def test_follow_up_only_for_supported_designs(self):
        with pytest.raises(DesignError):
            DesignSpec(kind=DesignKind.TWO_PHASE, n=2, n_prime=4, nonresponse=NonResponseDesign(2.0))

    def test_replicates(self):
        with pytest.raises(DesignError):
            srswor(4, replicates=1)

    def test_systematic_interval(self, oracle, pop2):
        with pytest.raises(DesignError):
            oracle.enumerate_design(pop2, DesignSpec(kind=DesignKind.SYSTEMATIC, n=3), standard_estimator("mean"))

    def test_responder_column_required(self, oracle, pop2):
        spec = DesignSpec(kind=DesignKind.SRSWOR_NONRESPONSE, n=4, nonresponse=NonResponseDesign(2.0))
        with pytest.raises(SchemaError, match="responder"):
            oracle.monte_carlo(pop2, spec, standard_estimator("mean"))

    def test_unknown_estimator(self):
        with pytest.raises(UnknownIdentifierError):
            standard_estimator("median")
