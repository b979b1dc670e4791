from dataclasses import fields

import numpy as np
import pytest

from managers.population_manager import PopulationManager, design_coefficients
from models.population_model import DesignCoefficients, Divisor, FinitePopulation
from utils.errors import DegenerateMomentError, DesignError, SchemaError


def assert_same_floats(first, second):
    for item in fields(first):
        value = getattr(first, item.name)
        if isinstance(value, float):
            assert getattr(second, item.name) == pytest.approx(value, rel=1e-12, abs=1e-12), item.name


class TestFinitePopulation:
    def test_columns_are_read_only(self, pop2):
        with pytest.raises(ValueError):
            pop2.y[0] = 1.0

    def test_rejects_single_unit(self):
        with pytest.raises(SchemaError):
            FinitePopulation(y=[1.0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(SchemaError, match="expected 3"):
            FinitePopulation(y=[1.0, 2.0, 3.0], x=[1.0, 2.0])

    def test_rejects_non_binary_attribute(self):
        with pytest.raises(SchemaError, match="only 0 or 1"):
            FinitePopulation(y=[1.0, 2.0, 3.0], phi1=[0.0, 1.0, 2.0])

    def test_rejects_non_finite(self):
        with pytest.raises(SchemaError):
            FinitePopulation(y=[1.0, 2.0, 3.0], x=[1.0, np.inf, 2.0])

    def test_require_names_missing_columns(self, pop2):
        with pytest.raises(SchemaError, match="phi1, phi2"):
            pop2.require("x", "phi1", "phi2")

    def test_reordered_keeps_units(self, pop2):
        reversed_pop = pop2.reordered(range(pop2.N - 1, -1, -1))
        assert reversed_pop.y[0] == pop2.y[-1]
        assert reversed_pop.z[-1] == pop2.z[0]

    def test_reordered_needs_permutation(self, pop2):
        with pytest.raises(SchemaError):
            pop2.reordered([0] * pop2.N)

    def test_from_records(self):
        population = FinitePopulation.from_records(
            [
                {"y": 1.0, "x": 2.0, "stratum": "A"},
                {"y": 3.0, "x": 4.0, "stratum": "B"},
            ]
        )
        assert population.N == 2
        assert population.stratum == ("A", "B")
        assert not population.has("z")

    def test_from_records_needs_same_columns(self):
        with pytest.raises(SchemaError, match="record 2"):
            FinitePopulation.from_records([{"y": 1.0, "x": 2.0}, {"y": 3.0}])


class TestSummarizeNumeric:
    def test_raw_population_two(self, pop2):
        stats = PopulationManager().summarize_numeric(pop2)
        assert stats.N == 10
        assert stats.mean_y == pytest.approx(52.0)
        assert stats.mean_x == pytest.approx(42.0)
        assert stats.mean_z == pytest.approx(200.0)
        assert stats.var_y == pytest.approx(66.0)
        assert stats.var_x == pytest.approx(30.0)
        assert stats.var_z == pytest.approx(750.0 / 9.0)
        assert stats.cov_yx == pytest.approx(319.0 / 9.0)
        assert stats.rho_yx == pytest.approx(0.79656, abs=1e-5)
        assert stats.rho_zx == pytest.approx(-330.0 / 450.0)
        assert stats.ratio_r1 == pytest.approx(52.0 / 42.0)

    def test_divisor_n(self, pop2):
        stats = PopulationManager(Divisor.N).summarize_numeric(pop2)
        assert stats.var_y == pytest.approx(59.4)
        # correlations do not depend on the divisor
        assert stats.rho_zx == pytest.approx(-330.0 / 450.0)

    def test_unit_order_does_not_matter(self, pop2):
        manager = PopulationManager()
        permuted = pop2.reordered(np.random.default_rng(3).permutation(pop2.N))
        assert_same_floats(manager.summarize_numeric(pop2), manager.summarize_numeric(permuted))

    def test_needs_an_auxiliary(self):
        with pytest.raises(SchemaError):
            PopulationManager().summarize_numeric(FinitePopulation(y=[1.0, 2.0, 4.0]))

    def test_constant_auxiliary(self):
        population = FinitePopulation(y=[1.0, 2.0, 4.0], x=[3.0, 3.0, 3.0])
        with pytest.raises(DegenerateMomentError, match="'x' has zero variance"):
            PopulationManager().summarize_numeric(population)


class TestSummarizeAttributes:
    @pytest.fixture
    def attributes_population(self):
        return FinitePopulation(
            y=[10.0, 12.0, 9.0, 20.0, 25.0, 14.0, 30.0, 8.0],
            phi1=[0, 1, 0, 1, 1, 0, 1, 0],
            phi2=[0, 0, 0, 1, 1, 0, 1, 1],
        )

    def test_proportions_and_correlations(self, attributes_population):
        summary = PopulationManager().summarize_attributes(attributes_population)
        assert summary.p1 == pytest.approx(0.5)
        assert summary.p2 == pytest.approx(0.5)
        expected = np.corrcoef(attributes_population.y, attributes_population.phi1)[0, 1]
        assert summary.rho_pb1 == pytest.approx(expected)
        assert summary.k_pb1 == pytest.approx(summary.rho_pb1 * summary.cv_y / summary.cv_p1)

    @pytest.mark.parametrize("divisor, scale", [(Divisor.N_MINUS_1, 8.0 / 7.0), (Divisor.N, 1.0)])
    def test_attribute_variance_is_binomial(self, attributes_population, divisor, scale):
        summary = PopulationManager(divisor).summarize_attributes(attributes_population)
        for p, var_phi in ((summary.p1, summary.var_phi1), (summary.p2, summary.var_phi2)):
            assert var_phi == pytest.approx(scale * p * (1.0 - p), rel=1e-12)

    def test_unit_order_does_not_matter(self, attributes_population):
        manager = PopulationManager()
        permuted = attributes_population.reordered([5, 2, 7, 0, 3, 6, 1, 4])
        assert_same_floats(
            manager.summarize_attributes(attributes_population),
            manager.summarize_attributes(permuted),
        )

    def test_constant_attribute(self):
        population = FinitePopulation(y=[1.0, 2.0, 3.0], phi1=[1, 1, 1], phi2=[0, 1, 0])
        with pytest.raises(DegenerateMomentError, match="phi1"):
            PopulationManager().summarize_attributes(population)


class TestDesignCoefficients:
    def test_lemma_coefficients(self):
        coeffs = design_coefficients(10, 4)
        assert coeffs.f == pytest.approx(0.4)
        assert coeffs.lam == pytest.approx(0.15)
        assert coeffs.g == pytest.approx(4.0 / 6.0)
        assert coeffs.l1 == pytest.approx(6.0 / 36.0)
        assert coeffs.l2 == pytest.approx(6.0 * 2.0 / (9.0 * 8.0 * 16.0))

    def test_small_population_has_no_fourth_order(self):
        coeffs = DesignCoefficients(N=3, n=2)
        assert coeffs.l3 is None
        assert coeffs.l4 is None

    def test_with_lemmas_overrides(self):
        coeffs = design_coefficients(10, 4).with_lemmas(l2=0.0, l3=0.0)
        assert coeffs.l2 == 0.0
        assert coeffs.l3 == 0.0
        assert coeffs.l4 > 0.0

    @pytest.mark.parametrize("N, n, n_prime", [(10, 10, None), (10, 1, None), (10, 4, 4), (10, 4, 10)])
    def test_invalid_sizes(self, N, n, n_prime):
        with pytest.raises(DesignError):
            design_coefficients(N, n, n_prime)

    def test_unknown_lemma(self):
        with pytest.raises(DesignError):
            design_coefficients(10, 4).with_lemmas(l5=0.0)

    def test_strata_gamma(self):
        coeffs = design_coefficients(10, 4, strata_sizes=[(6, 2), (4, 2)])
        assert coeffs.gamma_h == pytest.approx(((1 - 2 / 6) / 2, (1 - 2 / 4) / 2))
