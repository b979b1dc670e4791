import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from datasets.builtin import POP2_CSV  # noqa: E402
from managers.report_manager import load_population  # noqa: E402
from models.population_model import FinitePopulation  # noqa: E402


@pytest.fixture
def pop2() -> FinitePopulation:
    """Ten raw records of y, x and z shipped with the package."""
    return load_population(POP2_CSV)


@pytest.fixture
def synthetic12() -> FinitePopulation:
    """Small skewed population, enumerable for every n."""
    return FinitePopulation(
        y=[12.0, 15.0, 9.0, 22.0, 30.0, 11.0, 18.0, 25.0, 14.0, 40.0, 8.0, 19.0],
        x=[10.0, 13.0, 8.0, 20.0, 24.0, 10.0, 15.0, 21.0, 12.0, 35.0, 7.0, 16.0],
        z=[50.0, 44.0, 53.0, 39.0, 30.0, 49.0, 42.0, 36.0, 47.0, 22.0, 55.0, 41.0],
    )


@pytest.fixture
def systematic48() -> FinitePopulation:
    """48 ordered units with a trend and a responder flag; systematic samples use n=6, k=8."""
    rng = np.random.default_rng(7)
    x = np.linspace(20.0, 80.0, 48) + rng.normal(0.0, 4.0, 48)
    y = 1.5 * x + rng.normal(0.0, 6.0, 48)
    responder = (rng.random(48) < 0.7).astype(float)
    responder[:2] = [1.0, 0.0]
    return FinitePopulation(y=y, x=x, responder=responder)


@pytest.fixture
def population_csv(tmp_path):
    """Writes CSV text to a temporary file and returns its path."""

    def write(text: str, name: str = "population.csv") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
