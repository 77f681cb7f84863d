"""Synthetic stride curves: a fixed gait-like mean plus smooth noise, with optional drift.

Each stride is ``mu(s) + eps_i(s)`` on a uniform grid over ``[0, 1]``.  The
mean is a two-harmonic cycle; the noise mixes a few random low-frequency
harmonics with white noise.  From stride ``drift_start`` on, the second
harmonic's amplitude grows linearly with the stride index, which mimics a
slowly changing movement pattern.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import ConfigurationError
from ..pipeline import DEFAULT_GRID, StrideCurve
from .rng import make_rng

__all__ = ["GaitModel", "gait_mean", "synthetic_strides"]


def gait_mean(grid=DEFAULT_GRID):
    s = np.linspace(0.0, 1.0, grid)
    return np.sin(2 * np.pi * s) + 0.5 * np.sin(4 * np.pi * s + 0.3)


@dataclass(frozen=True)
class GaitModel:
    n_strides: int
    drift_start: int | None = None
    drift_rate: float = 0.004
    noise: float = 0.1
    smooth_noise: float = 0.1
    grid: int = DEFAULT_GRID
    seed: int = 0

    def __post_init__(self):
        if self.n_strides < 1 or self.grid < 2:
            raise ConfigurationError("need n_strides >= 1 and grid >= 2")
        if self.noise < 0 or self.smooth_noise < 0:
            raise ConfigurationError("noise levels must be nonnegative")


def synthetic_strides(model):
    """Draw ``model.n_strides`` curves; returns a list of :class:`StrideCurve`."""
    rng = make_rng(model.seed)
    s = np.linspace(0.0, 1.0, model.grid)
    base = gait_mean(model.grid)
    harmonic = 0.5 * np.sin(4 * np.pi * s + 0.3)
    waves = np.array([np.sin(2 * np.pi * h * s + 0.7 * h) for h in (1, 2, 3)])
    strides = []
    for i in range(model.n_strides):
        curve = base + model.smooth_noise * rng.standard_normal(3) @ waves
        curve = curve + model.noise * rng.standard_normal(model.grid)
        if model.drift_start is not None and i >= model.drift_start:
            curve = curve + model.drift_rate * (i - model.drift_start + 1) * harmonic
        strides.append(StrideCurve(i, curve))
    return strides
