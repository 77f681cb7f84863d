import numpy as np
import pytest


def null_crossing_fraction(schedule, alpha, n_streams, horizon, seed, t_max=None, chunk=1000):
    """Fraction of Bernoulli(alpha) streams whose martingale ever exceeds ``schedule``.

    Crossings are counted on ``schedule.start .. t_max`` (default: the horizon).
    """
    rng = np.random.default_rng(seed)
    bound = schedule.curve(horizon)
    if t_max is not None:
        bound[t_max:] = np.inf
    drift = alpha * np.arange(1, horizon + 1)
    crossed = 0
    for lo in range(0, n_streams, chunk):
        size = min(chunk, n_streams - lo)
        hits = rng.random((size, horizon)) < alpha
        m = np.cumsum(hits, axis=1, dtype=np.int32) - drift
        crossed += int(np.any(m > bound, axis=1).sum())
    return crossed / n_streams


@pytest.fixture
def crossing_fraction():
    return null_crossing_fraction


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    """Record one PASS/FAIL line per acceptance criterion; returns the pass flag."""

    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} | {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
