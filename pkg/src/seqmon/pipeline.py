"""From stride curves (or scalar features) to the indicator stream.

Steps:

1. the mean of the first ``n1`` strides is the reference profile,
2. the next ``n2`` strides are projected to scalar distances from it,
3. the upper ``(1 - alpha)`` order statistic of those distances is the
   local-test threshold,
4. every later stride yields one 0/1 indicator for the detector.

Curves live on a uniform grid over ``[0, 1]``; distances use grid means so
they do not depend on the grid resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_finite_1d
from .detector import LocalTest, estimate_threshold
from .exceptions import ConfigurationError, DataError

__all__ = [
    "DEFAULT_GRID",
    "FeatureKind",
    "StrideCurve",
    "ReferenceProfile",
    "resample",
    "reference_profile",
    "feature",
    "pool",
    "pool_many",
    "MonitoringRun",
    "build_monitoring_run",
    "StrideDistanceTransformer",
]

DEFAULT_GRID = 100


class FeatureKind(str, Enum):
    DIST_L2_SQ = "dist_l2_sq"
    DIST_L1 = "dist_l1"
    DIST_LINF = "dist_linf"
    PEAK = "peak"
    PASSTHROUGH = "passthrough"

    @classmethod
    def parse(cls, value):
        aliases = {"l2": cls.DIST_L2_SQ, "l1": cls.DIST_L1, "linf": cls.DIST_LINF}
        if isinstance(value, cls):
            return value
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise ConfigurationError(f"unknown feature kind {value!r}") from None

    @property
    def uses_reference(self):
        return self in (FeatureKind.DIST_L2_SQ, FeatureKind.DIST_L1, FeatureKind.DIST_LINF)


@dataclass(frozen=True)
class StrideCurve:
    stride_id: int
    values: np.ndarray

    def __post_init__(self):
        values = check_finite_1d(self.values, f"stride {self.stride_id}", min_length=2)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def grid_length(self):
        return self.values.size


@dataclass(frozen=True)
class ReferenceProfile:
    values: np.ndarray
    n1: int

    @property
    def grid_length(self):
        return self.values.size


def resample(raw, grid=DEFAULT_GRID, stride_id=0):
    """Linearly interpolate ``raw`` samples onto ``grid`` equidistant points of [0, 1]."""
    raw = check_finite_1d(raw, "raw stride", min_length=2)
    if grid < 2:
        raise DataError(f"target grid needs at least 2 points, got {grid}")
    if raw.size == grid:
        return StrideCurve(stride_id, raw.copy())
    src = np.linspace(0.0, 1.0, raw.size)
    dst = np.linspace(0.0, 1.0, grid)
    return StrideCurve(stride_id, np.interp(dst, src, raw))


def _values(curve):
    return curve.values if isinstance(curve, StrideCurve) else np.asarray(curve, dtype=float)


def reference_profile(strides):
    """Pointwise mean of ``strides`` (all must share one grid length)."""
    arrays = [_values(s) for s in strides]
    if not arrays:
        raise ConfigurationError("reference profile needs at least one stride")
    lengths = {a.size for a in arrays}
    if len(lengths) != 1:
        raise DataError(f"strides have mixed grid lengths {sorted(lengths)}; resample first")
    return ReferenceProfile(np.mean(np.vstack(arrays), axis=0), n1=len(arrays))


def feature(curve, reference, kind):
    """Project one stride to a scalar.

    Distances are taken against ``reference``: squared L2 and L1 use the grid
    mean, Linf the grid maximum.  ``peak`` is the curve maximum and
    ``passthrough`` expects a scalar already.
    """
    kind = FeatureKind.parse(kind)
    if kind is FeatureKind.PASSTHROUGH:
        arr = np.asarray(_values(curve), dtype=float).reshape(-1)
        if arr.size != 1:
            raise DataError(f"passthrough expects a scalar, got {arr.size} values")
        return float(arr[0])
    values = _values(curve)
    if kind is FeatureKind.PEAK:
        return float(np.max(values))
    ref = reference.values if isinstance(reference, ReferenceProfile) else np.asarray(reference, dtype=float)
    if ref.size != values.size:
        raise DataError(f"grid mismatch: curve has {values.size} points, reference {ref.size}")
    diff = values - ref
    if kind is FeatureKind.DIST_L2_SQ:
        return float(np.mean(diff * diff))
    if kind is FeatureKind.DIST_L1:
        return float(np.mean(np.abs(diff)))
    return float(np.max(np.abs(diff)))


_POOLERS = {"max": max, "min": min, "ave": lambda a, b: (a + b) / 2.0}


def pool(left, right, mode):
    """Combine two channel scores by ``max``, ``min`` or ``ave``."""
    if mode not in _POOLERS:
        raise ConfigurationError(f"pool mode must be one of {sorted(_POOLERS)}, got {mode!r}")
    if not (math.isfinite(left) and math.isfinite(right)):
        raise DataError("pooled values must be finite")
    return float(_POOLERS[mode](left, right))


def pool_many(values, mode):
    """Pool any number of channels.  ``max``/``min`` fold pairwise; ``ave`` is the plain mean."""
    values = [float(v) for v in values]
    if not values:
        raise ConfigurationError("nothing to pool")
    if mode == "ave":
        if not all(math.isfinite(v) for v in values):
            raise DataError("pooled values must be finite")
        return math.fsum(values) / len(values)
    out = values[0]
    for v in values[1:]:
        out = pool(out, v, mode)
    return out


@dataclass
class MonitoringRun:
    """Everything the detector needs from the curve data."""

    test: LocalTest
    references: list
    training_distances: np.ndarray
    distances: np.ndarray
    indicators: np.ndarray
    n1: int
    n2: int

    @property
    def n0(self):
        return self.n1 + self.n2


def _channel_distances(channel, n1, kind):
    kind = FeatureKind.parse(kind)
    reference = reference_profile(channel[:n1]) if kind.uses_reference else None
    return reference, np.array([feature(c, reference, kind) for c in channel])


def build_monitoring_run(strides, n1=100, n2=100, alpha=0.22, kind=FeatureKind.DIST_L2_SQ, pool_mode=None):
    """Reference from the first ``n1`` strides, threshold from the next ``n2``, indicators after.

    With ``pool_mode`` set, ``strides`` is a sequence of channels (each a
    stride sequence of equal length); per-stride distances are pooled across
    channels before the threshold is estimated.
    """
    n1, n2 = int(n1), int(n2)
    if n1 < 1 or n2 < 1:
        raise ConfigurationError("n1 and n2 must be at least 1")
    channels = list(strides) if pool_mode else [strides]
    if pool_mode and len(channels) < 2:
        raise ConfigurationError("pooling needs at least two channels")
    lengths = {len(c) for c in channels}
    if len(lengths) != 1:
        raise DataError(f"channels have different stride counts {sorted(lengths)}")
    (length,) = lengths
    if length <= n1 + n2:
        raise ConfigurationError(
            f"need more than n0 = n1 + n2 = {n1 + n2} strides to monitor, got {length}"
        )
    references, per_channel = [], []
    for channel in channels:
        ref, dists = _channel_distances(channel, n1, kind)
        references.append(ref)
        per_channel.append(dists)
    if pool_mode:
        stacked = np.vstack(per_channel)
        if pool_mode == "ave":
            distances = stacked.mean(axis=0)
        else:
            distances = np.array([pool_many(col, pool_mode) for col in stacked.T])
    else:
        distances = per_channel[0]
    training = distances[n1:n1 + n2]
    test = estimate_threshold(training, alpha)
    monitored = distances[n1 + n2:]
    indicators = (monitored >= test.threshold).astype(np.int8)
    return MonitoringRun(test, references, training, monitored, indicators, n1, n2)


class StrideDistanceTransformer(TransformerMixin, BaseEstimator):
    """Map a 2-d array of strides (rows on a common grid) to scalar features.

    ``fit`` stores the mean stride as ``reference_``; ``transform`` returns one
    value per row.
    """

    def __init__(self, kind="dist_l2_sq"):
        self.kind = kind

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise DataError(f"expected a 2-d array of strides, got shape {X.shape}")
        if not np.isfinite(X).all():
            raise DataError("strides contain non-finite values")
        self.reference_ = reference_profile(list(X))
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "reference_")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise DataError(f"expected a 2-d array of strides, got shape {X.shape}")
        return np.array([feature(row, self.reference_, self.kind) for row in X])
