"""Chi-square change-point scenarios and Monte Carlo evaluation of the detectors.

A scenario draws ``t0_true`` values from chi-square(``df_before``) followed by
``n - t0_true`` values from chi-square(``df_after``).  A martingale trial
estimates the local threshold from the head of the stream (the first 10 % by
default, or the first ``training_count`` points), then monitors; a CUSUM
trial scans the full stream retrospectively.  A detection at or before the
true change is a false positive.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from functools import lru_cache

import numpy as np

from ..bounds import make_schedule
from ..cusum import cusum_changepoint
from ..detector import estimate_threshold
from ..exceptions import ConfigurationError
from .rng import PRNG_NAME, chisquare_variates, make_rng
from .special import chisq_quantile, chisq_sf

__all__ = [
    "SCENARIO_DF",
    "Scenario",
    "scenario_preset",
    "DetectorConfig",
    "TrialOutcome",
    "McSummary",
    "AlphaYieldPoint",
    "generate_stream",
    "run_trial",
    "summarize",
    "monte_carlo",
    "alpha_yield_curve",
    "best_alpha",
    "report_payload",
]

# scenario j -> (df before, df after), from easiest to hardest
SCENARIO_DF = {"j1": (20, 36), "j2": (20, 30), "j3": (20, 27), "j4": (20, 25)}


@dataclass(frozen=True)
class Scenario:
    n: int
    t0_true: int
    df_before: int
    df_after: int
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.t0_true <= self.n:
            raise ConfigurationError(f"need 1 <= t0_true <= n, got t0_true={self.t0_true}, n={self.n}")
        for name in ("df_before", "df_after"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value}")


def scenario_preset(name, n=30_000, cp=None, seed=0):
    """Scenario ``j1``..``j4`` with the change at ``cp`` (default ``n // 2``)."""
    if name not in SCENARIO_DF:
        raise ConfigurationError(f"unknown scenario {name!r}; choose from {sorted(SCENARIO_DF)}")
    before, after = SCENARIO_DF[name]
    return Scenario(n=n, t0_true=n // 2 if cp is None else cp, df_before=before, df_after=after, seed=seed)


def generate_stream(sc):
    rng = make_rng(sc.seed)
    head = chisquare_variates(rng, sc.df_before, sc.t0_true)
    tail = chisquare_variates(rng, sc.df_after, sc.n - sc.t0_true)
    return np.concatenate([head, tail])


@dataclass(frozen=True)
class DetectorConfig:
    """Detector selection for simulation trials.

    The default is the general LIL bound with ``k = 0.25`` and
    ``kappa = kappa0(alpha)``, threshold from the first 10 % of the stream.
    """

    detector: str = "martingale"
    bound: str = "lil"
    alpha: float = 0.25
    delta: float = 0.1
    p: int = 10
    lil: str = "general"
    k: float = 0.25
    kappa: float | None = None
    delta_split: str = "full"
    training: str = "fraction"
    training_fraction: float = 0.1
    training_count: int = 200

    def __post_init__(self):
        if self.detector not in ("martingale", "cusum"):
            raise ConfigurationError(f"detector must be 'martingale' or 'cusum', got {self.detector!r}")
        if self.training not in ("fraction", "count"):
            raise ConfigurationError(f"training must be 'fraction' or 'count', got {self.training!r}")

    def schedule(self):
        return make_schedule(
            self.bound, self.alpha, self.delta, self.p,
            lil=self.lil, k=self.k, kappa=self.kappa, delta_split=self.delta_split,
        )

    def to_dict(self):
        return asdict(self)


@lru_cache(maxsize=32)
def _bound_curve(cfg, n):
    curve = cfg.schedule().curve(n)
    curve.setflags(write=False)
    return curve


@dataclass(frozen=True)
class TrialOutcome:
    detected_at: int | None
    t0_true: int

    @property
    def false_positive(self):
        return self.detected_at is not None and self.detected_at <= self.t0_true


def _martingale_detection(x, cfg):
    n = x.size
    if cfg.training == "fraction":
        n_train = max(1, int(round(cfg.training_fraction * n)))
        offset, monitored = 0, x
    else:
        n_train = cfg.training_count
        offset, monitored = n_train, x[n_train:]
    if n_train >= n:
        raise ConfigurationError(f"training window {n_train} leaves nothing to monitor (n={n})")
    threshold = estimate_threshold(x[:n_train], cfg.alpha).threshold
    indicators = monitored >= threshold
    m = np.cumsum(indicators, dtype=np.int64) - cfg.alpha * np.arange(1, monitored.size + 1)
    hits = np.flatnonzero(m > _bound_curve(cfg, monitored.size))
    return offset + int(hits[0]) + 1 if hits.size else None


def run_trial(sc, cfg):
    x = generate_stream(sc)
    if cfg.detector == "cusum":
        detected = cusum_changepoint(x).t_cp
    else:
        detected = _martingale_detection(x, cfg)
    return TrialOutcome(detected, sc.t0_true)


@dataclass
class McSummary:
    """Monte Carlo aggregates; detection statistics exclude non-detections."""

    trials: int
    mean_cp: float | None
    std_dev: float | None
    std_dev_star: float | None
    fp_count: int
    no_detect_count: int

    @property
    def fp_rate(self):
        return self.fp_count / self.trials

    def to_dict(self):
        return {**asdict(self), "fp_rate": self.fp_rate}


def _sample_std(values):
    return float(np.std(values, ddof=1)) if len(values) > 1 else None


def summarize(outcomes):
    detections = np.array([o.detected_at for o in outcomes if o.detected_at is not None], dtype=float)
    true_hits = np.array([o.detected_at for o in outcomes if o.detected_at is not None and not o.false_positive], dtype=float)
    return McSummary(
        trials=len(outcomes),
        mean_cp=float(detections.mean()) if detections.size else None,
        std_dev=_sample_std(detections),
        std_dev_star=_sample_std(true_hits),
        fp_count=sum(o.false_positive for o in outcomes),
        no_detect_count=sum(o.detected_at is None for o in outcomes),
    )


def monte_carlo(sc, cfg, trials, base_seed=None, return_outcomes=False):
    """Run ``trials`` independent trials; trial ``i`` uses seed ``base_seed + i``."""
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    base = sc.seed if base_seed is None else int(base_seed)
    outcomes = [run_trial(replace(sc, seed=base + i), cfg) for i in range(trials)]
    summary = summarize(outcomes)
    return (summary, outcomes) if return_outcomes else summary


def report_payload(sc, cfg, trials, base_seed, summary):
    """JSON-ready record of a Monte Carlo run, enough to repeat it."""
    return {
        "scenario": asdict(sc),
        "detector": cfg.to_dict(),
        "trials": trials,
        "base_seed": base_seed,
        "prng": PRNG_NAME,
        "summary": summary.to_dict(),
    }


@dataclass(frozen=True)
class AlphaYieldPoint:
    alpha: float
    alpha_prime: float
    net_yield: float
    df_after: int


def alpha_yield_curve(alpha_grid, df_before=20, df_after_list=(25, 27, 30, 36)):
    """Post-change exceedance rate ``alpha'`` of the pre-change ``(1 - alpha)`` quantile."""
    points = []
    for alpha in alpha_grid:
        if not 0.0 < alpha < 1.0:
            raise ConfigurationError(f"alpha grid values must lie in (0, 1), got {alpha}")
        q = chisq_quantile(1.0 - alpha, df_before)
        for df in df_after_list:
            alpha_prime = chisq_sf(q, df)
            points.append(AlphaYieldPoint(alpha, alpha_prime, alpha_prime - alpha, df))
    return points


def best_alpha(points, df_after):
    """Grid ``alpha`` with the largest net yield for one post-change law."""
    candidates = [pt for pt in points if pt.df_after == df_after]
    if not candidates:
        raise ConfigurationError(f"no points for df_after={df_after}")
    return max(candidates, key=lambda pt: (pt.net_yield, -pt.alpha)).alpha

