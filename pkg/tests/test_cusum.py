import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqmon.cusum import CusumWindow, cusum_changepoint, cusum_stat, cusum_trajectory
from seqmon.exceptions import DataError, DomainError


def brute_force(x, s1, s2):
    best_t, best = None, -1.0
    for t in range(s1 + 1, s2):
        left = x[s1:t]
        right = x[t:s2]
        mu1 = math.fsum(left) / len(left)
        mu2 = math.fsum(right) / len(right)
        y = abs(math.sqrt((s2 - t) * (t - s1) / (s2 - s1)) * (mu1 - mu2))
        if y > best:
            best_t, best = t, y
    return best_t, best


def test_against_brute_force():
    rng = np.random.default_rng(21)
    for _ in range(30):
        n = int(rng.integers(5, 300))
        x = rng.normal(size=n) + np.where(np.arange(n) >= n // 3, rng.normal(), 0.0)
        s1 = int(rng.integers(0, n // 3))
        s2 = int(rng.integers(s1 + 3, n + 1))
        res = cusum_changepoint(x, CusumWindow(s1, s2))
        t_ref, y_ref = brute_force(list(x), s1, s2)
        assert res.t_cp == t_ref
        assert abs(res.stat_max) == pytest.approx(y_ref, rel=1e-10)


def test_trajectory_matches_direct():
    x = np.random.default_rng(1).exponential(size=200) + 1e6
    w = CusumWindow.full(200)
    traj = cusum_trajectory(x, w)
    direct = [cusum_stat(x, w, t) for t in w.scan_range]
    np.testing.assert_allclose(traj, direct, rtol=0, atol=1e-7)


def test_step_change():
    x = np.r_[np.zeros(40), np.ones(60)]
    assert cusum_changepoint(x).t_cp == 40


def test_constant_series_picks_first():
    assert cusum_changepoint(np.full(50, 3.0), CusumWindow(5, 50)).t_cp == 6


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=60),
    st.floats(-100, 100),
    st.floats(0.1, 10),
)
def test_location_scale_invariance(values, shift, scale):
    x = np.array(values)
    traj = np.abs(cusum_trajectory(x, CusumWindow.full(x.size)))
    if traj.max() < 1e-6 or np.ptp(np.sort(traj)[-2:]) < 1e-6 * traj.max():
        return  # near ties are ambiguous under rounding
    a = cusum_changepoint(x).t_cp
    assert cusum_changepoint(scale * x + shift).t_cp == a
    assert cusum_changepoint(-x).t_cp == a


def test_antisymmetry():
    x = np.random.default_rng(8).normal(size=80)
    w = CusumWindow.full(80)
    np.testing.assert_allclose(cusum_trajectory(-x, w), -cusum_trajectory(x, w), atol=1e-12)


def test_window_validation():
    with pytest.raises(DomainError):
        CusumWindow(5, 6)
    with pytest.raises(DomainError):
        CusumWindow(-1, 10)
    with pytest.raises(DomainError):
        cusum_changepoint(np.zeros(5), CusumWindow(0, 10))
    with pytest.raises(DomainError):
        cusum_stat(np.zeros(10), CusumWindow.full(10), 10)
    with pytest.raises(DataError):
        cusum_changepoint([1.0, np.inf, 2.0])


def test_keep_trajectory():
    res = cusum_changepoint(np.arange(10.0), keep_trajectory=True)
    assert res.trajectory.shape == (9,)
