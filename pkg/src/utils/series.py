"""Truncated power series in one relative error e.

A series is a numpy array ``c`` with ``c[k]`` the coefficient of e**k, always of
length ``ORDER + 1``.
"""

from math import factorial

import numpy as np
from numpy.polynomial import polynomial as P

ORDER = 4


def _trim(coeffs) -> np.ndarray:
    out = np.zeros(ORDER + 1)
    coeffs = np.asarray(coeffs, dtype=float)[: ORDER + 1]
    out[: coeffs.size] = coeffs
    return out


def constant(value: float) -> np.ndarray:
    return _trim([value])


def identity() -> np.ndarray:
    """The series of e itself."""
    return _trim([0.0, 1.0])


def binomial(exponent: float, scale: float = 1.0) -> np.ndarray:
    """Series of (1 + scale*e)**exponent."""
    coeffs = np.empty(ORDER + 1)
    term = 1.0
    for k in range(ORDER + 1):
        coeffs[k] = term * scale**k
        term *= (exponent - k) / (k + 1)
    return coeffs


def multiply(a, b) -> np.ndarray:
    return _trim(P.polymul(a, b))


def exp(series) -> np.ndarray:
    """Series of exp(s) for s with zero constant term."""
    series = _trim(series)
    if series[0] != 0.0:
        raise ValueError("exp() needs a series without constant term")
    result = constant(1.0)
    power = constant(1.0)
    for k in range(1, ORDER + 1):
        power = multiply(power, series)
        result = result + power / factorial(k)
    return result


def half_ratio() -> np.ndarray:
    """Series of e/(2+e)."""
    return _trim([0.0] + [(-1.0) ** (k - 1) / 2.0**k for k in range(1, ORDER + 1)])


def evaluate(series, e):
    """Evaluates the truncated series at e (scalar or array)."""
    return P.polyval(e, series)
