"""Rejection-count martingale, local quantile tests and streaming monitors.

A stream of binary local-test outcomes ``I_1, I_2, ...`` is summarised by
``M_t = sum(I_1..I_t) - t * alpha``.  Under the null every ``I_i`` is
Bernoulli(alpha), so ``M_t`` is a centered martingale.  A change is declared
the first time ``M_t`` exceeds a time-uniform bound (see :mod:`seqmon.bounds`).

The streaming API (:class:`SequentialMonitor`, :func:`run_lil_monitor`,
:func:`run_hybrid_monitor`) processes one indicator at a time and keeps the
full trajectory.  :func:`first_crossing` is the vectorised equivalent used
for batch work; both give identical detection times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_finite_1d, check_probability
from .bounds import LilGeneralConfig, LilSpecConfig, build_hybrid_schedule, make_schedule
from .exceptions import ConfigurationError, DataError

__all__ = [
    "LocalTest",
    "MartingaleState",
    "Warmup",
    "Stable",
    "Detected",
    "step",
    "apply_local_test",
    "estimate_threshold",
    "SequentialMonitor",
    "run_monitor",
    "run_lil_monitor",
    "run_hybrid_monitor",
    "first_crossing",
    "MonitorResult",
    "MartingaleMonitor",
]


@dataclass(frozen=True)
class LocalTest:
    """Exceedance test: fires when an observation is at or above ``threshold``."""

    threshold: float

    def __post_init__(self):
        if not math.isfinite(self.threshold):
            raise ConfigurationError(f"threshold must be finite, got {self.threshold}")

    def __call__(self, observation):
        return apply_local_test(self, observation)


def apply_local_test(test, observation):
    """Return 1 if ``observation >= test.threshold`` else 0."""
    if not math.isfinite(observation):
        raise DataError(f"non-finite observation {observation!r}")
    return int(observation >= test.threshold)


def _upper_rank(n, alpha):
    # round before ceil so (1 - 0.22) * 200 = 156.00000000000003 stays 156
    return max(1, min(n, math.ceil(round((1.0 - alpha) * n, 9))))


def estimate_threshold(training, alpha):
    """Upper empirical ``(1 - alpha)`` quantile: order statistic ``ceil((1 - alpha) n)``.

    No interpolation is done, so the threshold is always one of the training
    values.
    """
    alpha = check_probability(alpha, "alpha")
    values = np.asarray(training, dtype=float).reshape(-1)
    if values.size == 0:
        raise ConfigurationError("threshold estimation needs at least one training value")
    values = check_finite_1d(values, "training")
    rank = _upper_rank(values.size, alpha)
    return LocalTest(float(np.partition(values, rank - 1)[rank - 1]))


@dataclass(frozen=True)
class MartingaleState:
    t: int = 0
    rejections: int = 0
    alpha: float = 0.22

    @property
    def value(self):
        """``M_t = S_t - t * alpha``."""
        return self.rejections - self.t * self.alpha


def step(state, indicator):
    """Advance the martingale by one local-test outcome."""
    if indicator not in (0, 1):
        raise DataError(f"indicator must be 0 or 1, got {indicator!r}", position=f"t={state.t + 1}")
    return replace(state, t=state.t + 1, rejections=state.rejections + int(indicator))


@dataclass(frozen=True)
class Warmup:
    t: int
    value: float


@dataclass(frozen=True)
class Stable:
    t: int
    value: float
    bound: float


@dataclass(frozen=True)
class Detected:
    t_hat: int
    value: float
    bound: float

    @property
    def t(self):
        return self.t_hat


Status = Union[Warmup, Stable, Detected]


class SequentialMonitor:
    """Single-writer state machine comparing ``M_t`` with a schedule.

    The martingale accumulates from ``t = 1``; crossings are only checked
    from ``schedule.start`` on.  After a detection further updates raise.

    Examples
    --------
    >>> from seqmon.bounds import make_schedule
    >>> mon = SequentialMonitor(make_schedule("hybrid", 0.22, 0.1), alpha=0.22)
    >>> status = None
    >>> while not isinstance(status, Detected):
    ...     status = mon.update(1)
    >>> status.t_hat
    5
    """

    def __init__(self, schedule, alpha):
        self.schedule = schedule
        self.state = MartingaleState(alpha=check_probability(alpha, "alpha"))
        self.trace = []
        self.detection = None

    def update(self, indicator):
        if self.detection is not None:
            raise RuntimeError(f"change already detected at t={self.detection.t_hat}")
        self.state = step(self.state, indicator)
        t, value = self.state.t, self.state.value
        if t < self.schedule.start:
            status = Warmup(t, value)
        else:
            bound = float(self.schedule.evaluate(t))
            if value > bound:
                status = self.detection = Detected(t, value, bound)
            else:
                status = Stable(t, value, bound)
        self.trace.append(status)
        return status

    def run(self, stream):
        """Consume ``stream`` until detection or exhaustion and return the trace."""
        iterator = iter(stream)
        while True:
            try:
                indicator = next(iterator)
            except StopIteration:
                break
            except DataError:
                raise
            except Exception as exc:
                raise DataError(f"stream failed: {exc}", position=f"t={self.state.t + 1}") from exc
            if isinstance(self.update(indicator), Detected):
                break
        return self.trace


def run_monitor(stream, schedule, alpha):
    """Run a fresh :class:`SequentialMonitor` over ``stream`` and return its trace."""
    return SequentialMonitor(schedule, alpha).run(stream)


def run_lil_monitor(stream, delta, alpha, general=None):
    """Monitor with the LIL bound only; nothing is checked before its start time.

    ``general`` selects the general parameterisation; by default the
    specialised constants are used.
    """
    schedule = general if isinstance(general, LilGeneralConfig) else LilSpecConfig(delta)
    return run_monitor(stream, schedule, alpha)


def run_hybrid_monitor(stream, delta, alpha, p=10, *, lil="spec", k=0.25, kappa=None, delta_split="full"):
    """Monitor with the piecewise-linear bound, then the LIL bound from its start time."""
    schedule = build_hybrid_schedule(alpha, delta, p, lil=lil, k=k, kappa=kappa, delta_split=delta_split)
    return run_monitor(stream, schedule, alpha)


def martingale_path(indicators, alpha):
    """``M_t`` for ``t = 1..n`` from a 0/1 array."""
    ind = np.asarray(indicators)
    t = np.arange(1, ind.size + 1, dtype=float)
    return np.cumsum(ind, dtype=np.int64) - alpha * t


def first_crossing(indicators, schedule, alpha):
    """Vectorised detection: first ``t >= schedule.start`` with ``M_t > bound``.

    Returns ``(t_hat or None, martingale, bound)`` with both arrays over
    ``t = 1..n`` (``bound`` is ``+inf`` before monitoring starts).
    """
    ind = np.asarray(indicators)
    if ind.size and not np.isin(ind, (0, 1)).all():
        bad = int(np.flatnonzero(~np.isin(ind, (0, 1)))[0])
        raise DataError("indicators must be 0 or 1", position=f"t={bad + 1}")
    m = martingale_path(ind, alpha)
    bound = schedule.curve(ind.size)
    hits = np.flatnonzero(m > bound)
    return (int(hits[0]) + 1 if hits.size else None), m, bound


@dataclass
class MonitorResult:
    """Batch monitoring outcome with the trajectory up to the stopping time."""

    detection_time: int | None
    martingale: np.ndarray
    bound: np.ndarray
    threshold: float | None = None

    @property
    def detected(self):
        return self.detection_time is not None

    @property
    def m_at_detection(self):
        return None if self.detection_time is None else float(self.martingale[self.detection_time - 1])

    @property
    def bound_at_detection(self):
        return None if self.detection_time is None else float(self.bound[self.detection_time - 1])

    def trajectory(self, stop_at_detection=False):
        """``(t, M_t, Gamma_t)`` rows; ``Gamma_t`` is None where the bound is not active."""
        stop = self.martingale.size
        if stop_at_detection and self.detection_time is not None:
            stop = self.detection_time
        return [
            (t + 1, float(self.martingale[t]), None if math.isinf(self.bound[t]) else float(self.bound[t]))
            for t in range(stop)
        ]


class MartingaleMonitor(BaseEstimator):
    """Scikit-learn style change detector on a stream of scalar scores.

    ``fit`` estimates the local-test threshold from rested-state scores;
    ``transform`` maps new scores to 0/1 indicators; ``predict`` returns, per
    time step, whether a change has been declared by then; ``monitor`` returns
    the full :class:`MonitorResult`.

    Parameters
    ----------
    alpha : float
        Local level of the quantile test.
    delta : float
        Global level of the time-uniform bound.
    p : int
        Number of lines of the piecewise-linear phase.
    bound : {'hybrid', 'linear', 'lil'}
    lil : {'spec', 'general'}
        LIL variant.
    k, kappa : float
        Parameters of the general LIL bound (``kappa=None`` means ``kappa0(alpha)``).
    delta_split : {'full', 'half'}
        How the hybrid bound spends ``delta`` across its two phases.
    """

    def __init__(self, alpha=0.22, delta=0.1, p=10, bound="hybrid", lil="spec", k=0.25, kappa=None, delta_split="full"):
        self.alpha = alpha
        self.delta = delta
        self.p = p
        self.bound = bound
        self.lil = lil
        self.k = k
        self.kappa = kappa
        self.delta_split = delta_split

    def _schedule(self):
        return make_schedule(
            self.bound, self.alpha, self.delta, self.p,
            lil=self.lil, k=self.k, kappa=self.kappa, delta_split=self.delta_split,
        )

    def fit(self, X, y=None):
        self.test_ = estimate_threshold(check_finite_1d(X, "training scores"), self.alpha)
        self.threshold_ = self.test_.threshold
        self.schedule_ = self._schedule()
        return self

    def transform(self, X):
        check_is_fitted(self, "test_")
        scores = check_finite_1d(X, "scores", min_length=0)
        return (scores >= self.threshold_).astype(np.int8)

    def monitor(self, X):
        check_is_fitted(self, "test_")
        t_hat, m, bound = first_crossing(self.transform(X), self.schedule_, self.alpha)
        return MonitorResult(t_hat, m, bound, threshold=self.threshold_)

    def predict(self, X):
        result = self.monitor(X)
        flags = np.zeros(result.martingale.size, dtype=bool)
        if result.detected:
            flags[result.detection_time - 1:] = True
        return flags

    def decision_function(self, X):
        """``M_t - Gamma_t``; positive values lie above the bound."""
        result = self.monitor(X)
        return result.martingale - result.bound
