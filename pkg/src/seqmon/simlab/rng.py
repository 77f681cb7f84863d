"""Seeded random streams.

Uniform and normal draws come from numpy's PCG64 bit generator; gamma and
chi-square variates are produced here by the Marsaglia-Tsang squeeze method,
vectorised by drawing proposal batches and keeping the accepted ones in order.
"""

import numpy as np

__all__ = ["PRNG_NAME", "make_rng", "gamma_variates", "chisquare_variates"]

PRNG_NAME = f"PCG64 (numpy {np.__version__}) + Marsaglia-Tsang gamma"


def make_rng(seed):
    """Generator for a 64-bit ``seed``; equal seeds give equal streams."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def _marsaglia_tsang(rng, shape, size):
    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(size)
    filled = 0
    while filled < size:
        need = size - filled
        batch = int(need * 1.05) + 16
        x = rng.standard_normal(batch)
        u = rng.random(batch)
        v = (1.0 + c * x) ** 3
        ok = v > 0
        squeeze = u < 1.0 - 0.0331 * x**4
        with np.errstate(divide="ignore"):
            log_v = np.log(np.where(ok, v, 1.0))
            full = np.log(u) < 0.5 * x * x + d * (1.0 - v + log_v)
        accepted = (d * v)[ok & (squeeze | full)]
        take = min(need, accepted.size)
        out[filled:filled + take] = accepted[:take]
        filled += take
    return out


def gamma_variates(rng, shape, size):
    """``size`` draws from Gamma(shape, scale=1)."""
    if not shape > 0:
        raise ValueError(f"gamma shape must be positive, got {shape}")
    if shape >= 1.0:
        return _marsaglia_tsang(rng, shape, size)
    # shape < 1: Gamma(shape) = Gamma(shape + 1) * U^(1/shape)
    boosted = _marsaglia_tsang(rng, shape + 1.0, size)
    return boosted * rng.random(size) ** (1.0 / shape)


def chisquare_variates(rng, df, size):
    """``size`` chi-square draws with ``df`` degrees of freedom (``2 * Gamma(df/2)``)."""
    return 2.0 * gamma_variates(rng, df / 2.0, size)
