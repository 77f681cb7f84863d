"""Retrospective single change-point CUSUM baseline.

For a window ``(s1, s2]`` of the 1-based series ``X_1..X_n`` and a split
``t`` in ``s1+1 .. s2-1`` the statistic is

    Y_t = sqrt((s2 - t)(t - s1) / (s2 - s1)) * (mean(X_{s1+1..t}) - mean(X_{t+1..s2}))

and the change-point estimate is the smallest ``t`` maximising ``|Y_t|``.
The scan uses prefix sums of the window centered at its exactly rounded mean,
which keeps the O(n) result within ~1e-12 of a from-scratch recomputation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_finite_1d
from .exceptions import DomainError

__all__ = ["CusumWindow", "CusumResult", "cusum_stat", "cusum_trajectory", "cusum_changepoint"]


@dataclass(frozen=True)
class CusumWindow:
    s1: int
    s2: int

    def __post_init__(self):
        if not self.s1 < self.s2 - 1:
            raise DomainError(f"window needs s1 < s2 - 1, got s1={self.s1}, s2={self.s2}")
        if self.s1 < 0:
            raise DomainError(f"s1 must be >= 0, got {self.s1}")

    @classmethod
    def full(cls, n):
        return cls(0, n)

    @property
    def scan_range(self):
        return range(self.s1 + 1, self.s2)


@dataclass
class CusumResult:
    t_cp: int
    stat_max: float
    trajectory: np.ndarray | None = None


def _window_data(data, window):
    x = check_finite_1d(data, "data", min_length=0)
    if window.s2 > x.size:
        raise DomainError(f"window end s2={window.s2} beyond data length {x.size}")
    return x[window.s1:window.s2]


def cusum_stat(data, window, t):
    """``Y_t`` computed directly from the two segment means."""
    if t not in window.scan_range:
        raise DomainError(f"t={t} outside scan range {window.s1 + 1}..{window.s2 - 1}")
    x = _window_data(data, window)
    split = t - window.s1
    mu1 = math.fsum(x[:split]) / split
    mu2 = math.fsum(x[split:]) / (x.size - split)
    s1, s2 = window.s1, window.s2
    return math.sqrt((s2 - t) * (t - s1) / (s2 - s1)) * (mu1 - mu2)


def cusum_trajectory(data, window):
    """All ``Y_t`` over the scan range, as an array indexed from ``t = s1 + 1``."""
    x = _window_data(data, window)
    m = x.size
    centered = x - math.fsum(x) / m
    prefix = np.cumsum(centered)
    total = prefix[-1]
    left_n = np.arange(1, m, dtype=float)
    right_n = m - left_n
    left_sum = prefix[:-1]
    mu1 = left_sum / left_n
    mu2 = (total - left_sum) / right_n
    return np.sqrt(right_n * left_n / m) * (mu1 - mu2)


def cusum_changepoint(data, window=None, keep_trajectory=False):
    """``argmax_t |Y_t|`` with ties going to the smallest ``t``."""
    x = check_finite_1d(data, "data", min_length=0)
    window = window or CusumWindow.full(x.size)
    traj = cusum_trajectory(x, window)
    if traj.size == 0:
        raise DomainError("empty scan range")
    idx = int(np.argmax(np.abs(traj)))
    return CusumResult(
        t_cp=window.s1 + 1 + idx,
        stat_max=float(traj[idx]),
        trajectory=traj if keep_trajectory else None,
    )
