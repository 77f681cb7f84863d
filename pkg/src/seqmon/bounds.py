"""Time-uniform thresholds for the centered rejection-count martingale.

Three families are provided, all sharing the same small interface
(``start``, ``evaluate(t)``, ``curve(n)``, ``phase_marks()``, ``describe()``):

* :class:`LilSpecConfig` -- the law-of-the-iterated-logarithm bound with the
  constants specialised to a local level of 0.2,
* :class:`LilGeneralConfig` -- the fully parameterised LIL bound,
* :class:`LinearSchedule` -- a piecewise-linear bound made of tangent-like
  lines, each tight at an anchor time, valid from the very first steps.

:class:`HybridSchedule` uses the piecewise-linear bound before the LIL start
time and the LIL bound from then on.  All arithmetic is float64 with natural
logarithms.  Schedules are immutable once built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import ceil_snapped, check_probability
from .exceptions import ConfigurationError, PreconditionError

__all__ = [
    "LilSpecConfig",
    "LilGeneralConfig",
    "Segment",
    "LinearSchedule",
    "HybridSchedule",
    "lil_start_spec",
    "lil_bound_spec",
    "kappa0",
    "lil_start_general",
    "lil_bound_general",
    "build_linear_schedule",
    "linear_bound_eval",
    "build_hybrid_schedule",
    "hybrid_bound",
    "make_schedule",
    "BOUND_FAMILIES",
]

BOUND_FAMILIES = ("lil", "linear", "hybrid")
_E = math.e


def _as_times(t):
    arr = np.asarray(t, dtype=float)
    return arr, arr.ndim == 0


def _unwrap(values, scalar):
    return float(values) if scalar else values


class _Schedule:
    """Shared helpers; subclasses define ``start`` and ``evaluate``."""

    def curve(self, n):
        """Bound at ``t = 1..n`` as an array, ``+inf`` where monitoring is not active."""
        t = np.arange(1, n + 1, dtype=float)
        out = np.full(n, np.inf)
        active = t >= self.start
        if active.any():
            out[active] = self.evaluate(t[active])
        return out

    def __call__(self, t):
        return self.evaluate(t)


# ---------------------------------------------------------------------------
# LIL bound, specialised constants


def lil_start_spec(delta):
    """First monitored time of the specialised LIL bound, ``ceil(780 ln(1/delta))``."""
    delta = check_probability(delta, "delta", high=0.5, high_inclusive=True)
    return ceil_snapped(780.0 * math.log(1.0 / delta))


def lil_bound_spec(t, delta):
    """``sqrt(0.7 t (ln ln(0.2 t) + 0.5 ln(10/delta)))`` for ``t >= lil_start_spec(delta)``."""
    start = lil_start_spec(delta)
    times, scalar = _as_times(t)
    if np.any(times < start):
        raise PreconditionError(
            f"specialised LIL bound is only valid for t >= {start}, got t={np.min(times)}"
        )
    values = np.sqrt(0.7 * times * (np.log(np.log(0.2 * times)) + 0.5 * math.log(10.0 / delta)))
    return _unwrap(values, scalar)


@dataclass(frozen=True)
class LilSpecConfig(_Schedule):
    """Specialised LIL bound; only ``delta`` is free."""

    delta: float

    def __post_init__(self):
        check_probability(self.delta, "delta", high=0.5, high_inclusive=True)

    @property
    def start(self):
        return lil_start_spec(self.delta)

    def evaluate(self, t):
        return lil_bound_spec(t, self.delta)

    def phase_marks(self):
        return {"s0_lil": self.start}

    def describe(self):
        return {"family": "lil", "variant": "spec", "delta": self.delta}


# ---------------------------------------------------------------------------
# LIL bound, general parameterisation


def kappa0(alpha):
    """Smallest admissible variance-inflation factor for local level ``alpha``."""
    alpha = check_probability(alpha, "alpha", high=0.5, high_inclusive=True)
    branch = max(1.0 / (6.0 * _E**4) - 0.1 * alpha, 0.0)
    return (0.5 + 1.0 / (20.0 * _E**8) - 0.4 * alpha + branch) / (1.0 - alpha)


@dataclass(frozen=True)
class LilGeneralConfig(_Schedule):
    """General LIL bound.

    ``kappa=None`` resolves to :func:`kappa0` of ``alpha``.  Passing a value
    below that minimum is rejected.
    """

    alpha: float
    delta: float
    k: float = 0.25
    kappa: float | None = None

    def __post_init__(self):
        check_probability(self.alpha, "alpha", high=0.5, high_inclusive=True)
        check_probability(self.delta, "delta", high=0.5, high_inclusive=True)
        check_probability(self.k, "k")
        floor = kappa0(self.alpha)
        if self.kappa is None:
            object.__setattr__(self, "kappa", floor)
        elif not float(self.kappa) >= floor:
            raise ConfigurationError(
                f"kappa={self.kappa} is below kappa0(alpha={self.alpha})={floor:.6f}"
            )

    @property
    def variance_scale(self):
        """``kappa * alpha * (1 - alpha)``."""
        return self.kappa * self.alpha * (1.0 - self.alpha)

    @property
    def start(self):
        return lil_start_general(self)

    def evaluate(self, t):
        return lil_bound_general(t, self)

    def phase_marks(self):
        return {"s0_lil": self.start}

    def describe(self):
        return {
            "family": "lil",
            "variant": "general",
            "alpha": self.alpha,
            "delta": self.delta,
            "k": self.k,
            "kappa": self.kappa,
        }


def lil_start_general(cfg):
    """``ceil(e^4 (1+sqrt k)^2 / (kappa alpha (1-alpha)) * ln(1/delta))``."""
    value = _E**4 * (1.0 + math.sqrt(cfg.k)) ** 2 / cfg.variance_scale * math.log(1.0 / cfg.delta)
    return ceil_snapped(value)


def lil_bound_general(t, cfg):
    """General LIL bound: square-root term, capped by ``2 v t / e^2`` then floored at 1."""
    start = lil_start_general(cfg)
    times, scalar = _as_times(t)
    if np.any(times < start):
        raise PreconditionError(
            f"general LIL bound is only valid for t >= {start}, got t={np.min(times)}"
        )
    v = cfg.variance_scale
    rk = math.sqrt(cfg.k)
    loglog_arg = 2.0 * v * times / (1.0 - rk)
    # cannot trigger for t >= start with a valid config
    assert np.all(loglog_arg > 1.0), "log-log argument must exceed 1"
    level_term = math.log(2.0 / (cfg.delta * math.log((1.0 + rk) / (1.0 - rk))))
    root = np.sqrt(4.0 / (1.0 - cfg.k) * v * times * (2.0 * np.log(np.log(loglog_arg)) + level_term))
    values = np.maximum(np.minimum(root, 2.0 * v * times / _E**2), 1.0)
    return _unwrap(values, scalar)


# ---------------------------------------------------------------------------
# Piecewise-linear bound


@dataclass(frozen=True)
class Segment:
    """One line ``slope * t + intercept`` active on ``[tau_lo, tau_hi)``."""

    tau_lo: float
    tau_hi: float
    slope: float
    intercept: float
    anchor: float
    delta_j: float


@dataclass(frozen=True)
class LinearSchedule(_Schedule):
    segments: tuple
    alpha: float
    delta: float
    _lo: np.ndarray = field(init=False, repr=False, compare=False)
    _slopes: np.ndarray = field(init=False, repr=False, compare=False)
    _intercepts: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_lo", np.array([s.tau_lo for s in self.segments]))
        object.__setattr__(self, "_slopes", np.array([s.slope for s in self.segments]))
        object.__setattr__(self, "_intercepts", np.array([s.intercept for s in self.segments]))

    @property
    def p(self):
        return len(self.segments)

    @property
    def tau0(self):
        return self.segments[0].tau_lo

    @property
    def start(self):
        return max(1, math.ceil(self.tau0))

    @property
    def breakpoints(self):
        """Finite breakpoints ``tau_1 .. tau_{p-1}``."""
        return [s.tau_hi for s in self.segments[:-1]]

    @property
    def anchors(self):
        return [s.anchor for s in self.segments]

    @property
    def deltas(self):
        return [s.delta_j for s in self.segments]

    def evaluate(self, t):
        return linear_bound_eval(self, t)

    def phase_marks(self):
        return {"tau0": self.tau0, "breakpoints": self.breakpoints}

    def describe(self):
        return {
            "family": "linear",
            "alpha": self.alpha,
            "delta": self.delta,
            "p": self.p,
            "anchors": self.anchors,
            "deltas": self.deltas,
        }


def _intersection(t_a, t_b, log_a, log_b):
    """Time at which the lines anchored at ``t_a`` and ``t_b`` cross."""
    if t_a == t_b:
        return t_a
    ra, rb = math.sqrt(log_a), math.sqrt(log_b)
    num = rb * math.sqrt(t_b) - ra * math.sqrt(t_a)
    den = ra * math.sqrt(t_b) - rb * math.sqrt(t_a)
    if den == 0.0:
        return math.inf
    return math.sqrt(t_a * t_b) * num / den


def build_linear_schedule(p, delta, anchors, alpha, deltas=None):
    """Build the piecewise-linear bound from ``p`` anchors and per-line budgets.

    Parameters
    ----------
    p : int
        Number of lines.
    delta : float
        Global budget; ``sum(deltas)`` may not exceed it.
    anchors : sequence of float
        Nondecreasing anchor times ``t_1..t_p``; line ``j`` touches
        ``sqrt((t_j / 2) ln(1/Delta_j))`` at ``t_j``.
    alpha : float
        Local level; only enters through the start time ``2 alpha ln(1/Delta_1)``.
    deltas : sequence of float, optional
        Per-line budgets. Defaults to ``delta / p`` each.

    Raises
    ------
    ConfigurationError
        On a budget overrun, non-monotone anchors, or when the breakpoints do
        not interleave with the anchors.
    """
    if int(p) != p or p < 1:
        raise ConfigurationError(f"p must be a positive integer, got {p!r}")
    p = int(p)
    delta = check_probability(delta, "delta")
    alpha = check_probability(alpha, "alpha")
    anchors = [float(a) for a in anchors]
    if len(anchors) != p:
        raise ConfigurationError(f"expected {p} anchors, got {len(anchors)}")
    if any(a <= 0 or not math.isfinite(a) for a in anchors):
        raise ConfigurationError("anchors must be positive and finite")
    if any(b < a for a, b in zip(anchors, anchors[1:])):
        raise ConfigurationError("anchors must be nondecreasing")
    if deltas is None:
        deltas = [delta / p] * p
    deltas = [float(d) for d in deltas]
    if len(deltas) != p:
        raise ConfigurationError(f"expected {p} per-line budgets, got {len(deltas)}")
    for j, d in enumerate(deltas, start=1):
        if not 0.0 < d < 1.0:
            raise ConfigurationError(f"Delta_{j}={d} outside (0, 1)")
    if math.fsum(deltas) > delta * (1.0 + 1e-12):
        raise ConfigurationError(f"sum of Delta_j = {math.fsum(deltas)} exceeds delta = {delta}")

    logs = [math.log(1.0 / d) for d in deltas]
    taus = [2.0 * alpha * logs[0]]
    for j in range(p - 1):
        taus.append(_intersection(anchors[j], anchors[j + 1], logs[j], logs[j + 1]))
    taus.append(math.inf)

    tol = 1e-12
    for j in range(1, p):
        lo, hi = anchors[j - 1], anchors[j]
        if not (lo * (1 - tol) <= taus[j] <= hi * (1 + tol)):
            raise ConfigurationError(
                f"interleaving t_{j} <= tau_{j} <= t_{j + 1} violated at j={j}: "
                f"t_{j}={lo}, tau_{j}={taus[j]}, t_{j + 1}={hi}"
            )

    segments = []
    for j in range(p):
        coef = math.sqrt(logs[j] / 8.0)
        root = math.sqrt(anchors[j])
        segments.append(
            Segment(
                tau_lo=taus[j],
                tau_hi=taus[j + 1],
                slope=coef / root,
                intercept=coef * root,
                anchor=anchors[j],
                delta_j=deltas[j],
            )
        )
    return LinearSchedule(tuple(segments), alpha=alpha, delta=delta)


def linear_bound_eval(schedule, t):
    """Value of the active line at ``t``; raises before ``tau_0``."""
    times, scalar = _as_times(t)
    if np.any(times < schedule.tau0):
        raise PreconditionError(
            f"linear bound starts at tau_0={schedule.tau0:.6g}, got t={np.min(times)}"
        )
    idx = np.searchsorted(schedule._lo, times, side="right") - 1
    values = schedule._slopes[idx] * times + schedule._intercepts[idx]
    return _unwrap(values, scalar)


# ---------------------------------------------------------------------------
# Hybrid


@dataclass(frozen=True)
class HybridSchedule(_Schedule):
    """Linear phase on ``[tau_0, switch_time)``, LIL phase from ``switch_time``."""

    linear: LinearSchedule
    lil: LilSpecConfig | LilGeneralConfig

    @property
    def switch_time(self):
        return self.lil.start

    @property
    def start(self):
        return self.linear.start

    def evaluate(self, t):
        return hybrid_bound(t, self)

    def phase_marks(self):
        return {
            "tau0": self.linear.tau0,
            "breakpoints": self.linear.breakpoints,
            "s0_lil": self.switch_time,
        }

    def describe(self):
        return {"family": "hybrid", "linear": self.linear.describe(), "lil": self.lil.describe()}


def hybrid_bound(t, schedule):
    """Linear value before the switch time, LIL value from the switch time on."""
    times, scalar = _as_times(t)
    switch = schedule.switch_time
    out = np.empty(times.shape)
    early = times < switch
    if np.any(early):
        out[early] = linear_bound_eval(schedule.linear, times[early])
    if np.any(~early):
        out[~early] = schedule.lil.evaluate(times[~early])
    return _unwrap(out, scalar)


def _lil_config(alpha, delta, lil, k, kappa):
    if isinstance(lil, (LilSpecConfig, LilGeneralConfig)):
        return lil
    if lil == "spec":
        return LilSpecConfig(delta)
    if lil == "general":
        return LilGeneralConfig(alpha=alpha, delta=delta, k=k, kappa=kappa)
    raise ConfigurationError(f"unknown LIL variant {lil!r} (expected 'spec' or 'general')")


def _split(delta, delta_split):
    if delta_split == "full":
        return delta
    if delta_split == "half":
        return delta / 2.0
    raise ConfigurationError(f"delta_split must be 'full' or 'half', got {delta_split!r}")


def build_hybrid_schedule(alpha, delta, p=10, *, lil="spec", k=0.25, kappa=None, delta_split="full"):
    """Hybrid schedule with ``p`` equidistant anchors from ``tau_0`` to the LIL start.

    ``delta_split='full'`` spends ``delta`` in each phase, as the monitoring
    algorithm is written; ``'half'`` gives each phase ``delta / 2``.
    """
    alpha = check_probability(alpha, "alpha")
    delta = check_probability(delta, "delta", high=0.5, high_inclusive=True)
    phase_delta = _split(delta, delta_split)
    lil_cfg = _lil_config(alpha, phase_delta, lil, k, kappa)
    s0 = lil_cfg.start
    tau0 = 2.0 * alpha * math.log(p / phase_delta)
    if s0 < tau0:
        raise ConfigurationError(f"LIL start {s0} precedes tau_0={tau0:.3f}")
    if p == 1:
        anchors = [float(s0)]
    else:
        anchors = [tau0 + (j / (p - 1)) * (s0 - tau0) for j in range(p)]
        anchors[-1] = float(s0)
    linear = build_linear_schedule(p, phase_delta, anchors, alpha)
    return HybridSchedule(linear=linear, lil=lil_cfg)


def make_schedule(family, alpha, delta, p=10, *, lil="spec", k=0.25, kappa=None, delta_split="full"):
    """Factory used by the monitors and the CLI.

    ``family='linear'`` returns the linear phase of the hybrid schedule, whose
    last line extends to infinity.
    """
    if family == "lil":
        delta = check_probability(delta, "delta", high=0.5, high_inclusive=True)
        return _lil_config(alpha, delta, lil, k, kappa)
    if family not in ("linear", "hybrid"):
        raise ConfigurationError(f"unknown bound family {family!r}; choose from {BOUND_FAMILIES}")
    hybrid = build_hybrid_schedule(
        alpha, delta, p, lil=lil, k=k, kappa=kappa, delta_split=delta_split
    )
    return hybrid if family == "hybrid" else hybrid.linear

