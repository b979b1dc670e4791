"""Grid minimization used to confirm closed-form optima."""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from utils.errors import DegenerateOptimumError

GRID_POINTS = 100_001
REFINE_POINTS = 2_001


@dataclass(frozen=True)
class GridResult:
    """Location and value of a grid minimum."""

    argmin: float
    minimum: float
    points: int


def grid_minimize(
    objective: Callable[[np.ndarray], np.ndarray],
    lower: float,
    upper: float,
    points: int = GRID_POINTS,
    refine: bool = True,
) -> GridResult:
    """Minimizes a vectorized objective on [lower, upper].

    A second, finer grid is laid over the two cells around the coarse minimum
    when ``refine`` is set.
    """
    if not upper > lower:
        raise DegenerateOptimumError(f"empty search interval [{lower}, {upper}]")
    grid = np.linspace(lower, upper, points)
    values = np.asarray(objective(grid), dtype=float)
    if not np.all(np.isfinite(values)):
        raise DegenerateOptimumError("objective is not finite on the search grid")
    best = int(np.argmin(values))
    total = points
    if refine:
        step = grid[1] - grid[0]
        fine = np.linspace(grid[best] - step, grid[best] + step, REFINE_POINTS)
        fine_values = np.asarray(objective(fine), dtype=float)
        total += REFINE_POINTS
        fine_best = int(np.argmin(fine_values))
        if fine_values[fine_best] < values[best]:
            return GridResult(float(fine[fine_best]), float(fine_values[fine_best]), total)
    return GridResult(float(grid[best]), float(values[best]), total)


def search_interval(center: float, span: float = 10.0) -> tuple:
    """Interval of half-width ``span * max(1, |center|)`` around ``center``."""
    half = span * max(1.0, abs(center))
    return center - half, center + half
