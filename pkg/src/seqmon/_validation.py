"""Small input validation helpers in the spirit of ``sklearn.utils.validation``."""

import math
from numbers import Real

import numpy as np

from .exceptions import DataError, DomainError


def check_probability(value, name, *, low=0.0, high=1.0, high_inclusive=False):
    """Return ``value`` as float if it lies in ``(low, high)`` (or ``(low, high]``)."""
    if not isinstance(value, Real) or isinstance(value, bool):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    ok = low < value < high or (high_inclusive and value == high)
    if not ok:
        bracket = "]" if high_inclusive else ")"
        raise DomainError(f"{name}={value} outside ({low}, {high}{bracket}")
    return value


def check_finite_1d(values, name="values", *, min_length=1):
    """Convert to a 1-d float array and reject NaN/Inf with the offending index."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size < min_length:
        raise DataError(f"{name} needs at least {min_length} values, got {arr.size}")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise DataError(f"{name} contains a non-finite value", position=f"index {bad[0]}")
    return arr


def ceil_snapped(x, rel=1e-12):
    """Ceiling that treats values within ``rel`` of an integer as that integer.

    Guards closed forms such as ``780 * log(1/delta)`` at ``delta = 1/e`` against
    a one-ulp overshoot turning 780 into 781.
    """
    nearest = round(x)
    if abs(x - nearest) <= rel * max(1.0, abs(x)):
        return int(nearest)
    return int(math.ceil(x))
