import math

import numpy as np
import pytest

from seqmon.exceptions import ConfigurationError
from seqmon.simlab import (
    DetectorConfig,
    McSummary,
    Scenario,
    TrialOutcome,
    alpha_yield_curve,
    best_alpha,
    generate_stream,
    monte_carlo,
    report_payload,
    run_trial,
    scenario_preset,
    summarize,
)


def test_stream_determinism():
    sc = scenario_preset("j1", n=2000, seed=5)
    np.testing.assert_array_equal(generate_stream(sc), generate_stream(sc))
    x = generate_stream(sc)
    assert x.size == 2000 and np.all(x > 0)


def test_stream_means():
    x = generate_stream(Scenario(200_000, 100_000, 20, 36, seed=1))
    assert x[:100_000].mean() == pytest.approx(20, abs=0.1)
    assert x[100_000:].mean() == pytest.approx(36, abs=0.15)


def test_scenario_validation():
    with pytest.raises(ConfigurationError):
        Scenario(100, 0, 20, 25)
    with pytest.raises(ConfigurationError):
        Scenario(100, 50, 0, 25)
    with pytest.raises(ConfigurationError):
        scenario_preset("j9")
    with pytest.raises(ConfigurationError):
        DetectorConfig(detector="ewma")


def test_summary_excludes_non_detections():
    outcomes = [TrialOutcome(110, 100), TrialOutcome(90, 100), TrialOutcome(None, 100), TrialOutcome(130, 100)]
    s = summarize(outcomes)
    assert s.trials == 4 and s.no_detect_count == 1 and s.fp_count == 1
    assert s.mean_cp == pytest.approx((110 + 90 + 130) / 3)
    assert s.std_dev == pytest.approx(np.std([110, 90, 130], ddof=1))
    assert s.std_dev_star == pytest.approx(np.std([110, 130], ddof=1))
    assert s.fp_rate == 0.25


def test_summary_degenerate():
    s = summarize([TrialOutcome(None, 10)] * 3)
    assert s.mean_cp is None and s.std_dev is None and s.fp_rate == 0
    s = summarize([TrialOutcome(10, 10)])
    assert s.fp_count == 1 and s.std_dev is None and s.std_dev_star is None


def test_fp_boundary():
    assert TrialOutcome(100, 100).false_positive
    assert not TrialOutcome(101, 100).false_positive


def test_monte_carlo_reproducible():
    sc = scenario_preset("j1", n=6000, seed=0)
    cfg = DetectorConfig()
    a, outcomes = monte_carlo(sc, cfg, 5, base_seed=10, return_outcomes=True)
    b = monte_carlo(sc, cfg, 5, base_seed=10)
    assert a == b
    assert outcomes[2] == run_trial(Scenario(6000, 3000, 20, 36, seed=12), cfg)
    payload = report_payload(sc, cfg, 5, 10, a)
    assert payload["summary"]["fp_rate"] == a.fp_rate and "PCG64" in payload["prng"]


def test_count_training_offset():
    sc = scenario_preset("j1", n=6000, seed=3)
    out = run_trial(sc, DetectorConfig(bound="hybrid", lil="spec", alpha=0.22, training="count", training_count=200))
    assert out.detected_at is None or out.detected_at > 200


def test_cusum_trial():
    out = run_trial(scenario_preset("j1", n=4000, seed=1), DetectorConfig(detector="cusum"))
    assert abs(out.detected_at - 2000) < 100


def test_null_false_alarm_rate_sane():
    # no change within the stream: detections are all false alarms, bounded by delta in expectation
    sc = Scenario(6000, 6000, 20, 20)
    summary = monte_carlo(sc, DetectorConfig(), 200, base_seed=500)
    assert summary.fp_count / 200 <= 0.1 + 3 * math.sqrt(0.09 / 200)


def test_alpha_yield_shape():
    grid = [i / 100 for i in range(1, 100)]
    points = alpha_yield_curve(grid)
    assert len(points) == 99 * 4
    for pt in points:
        assert pt.alpha_prime >= pt.alpha - 1e-12  # stochastically larger post-change law
        assert pt.net_yield == pytest.approx(pt.alpha_prime - pt.alpha)
    # alpha' <= 1 caps the yield near alpha = 1
    assert all(pt.net_yield <= 0.01 + 1e-12 for pt in points if pt.alpha == 0.99)
    # the best alpha moves down as the post-change law separates further
    best = [best_alpha(points, df) for df in (25, 27, 30, 36)]
    assert best == sorted(best, reverse=True)
    with pytest.raises(ConfigurationError):
        alpha_yield_curve([0.0])
    with pytest.raises(ConfigurationError):
        best_alpha(points, 99)


def test_summary_dict():
    d = McSummary(10, 1.0, 0.5, 0.4, 1, 0).to_dict()
    assert d["fp_rate"] == 0.1
