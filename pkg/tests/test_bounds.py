import math

import numpy as np
import pytest

from seqmon.bounds import (
    HybridSchedule,
    LilGeneralConfig,
    LilSpecConfig,
    build_hybrid_schedule,
    build_linear_schedule,
    hybrid_bound,
    kappa0,
    lil_bound_general,
    lil_bound_spec,
    lil_start_general,
    lil_start_spec,
    linear_bound_eval,
    make_schedule,
)
from seqmon.exceptions import ConfigurationError, DomainError, PreconditionError

# Frozen from 50-digit mpmath evaluations.
LIL_SPEC_2000 = 75.6973537416369369
LIL_SPEC_3000 = 93.4486317526180694
KAPPA0 = {
    0.5: 0.600033546262790251,
    0.25: 0.533355697508526834,
    0.22: 0.528226632219737341,
    0.2: 0.525020966414243907,
    0.01: 0.503100383447324063,
}


class TestLilSpec:
    def test_start_times(self):
        assert lil_start_spec(0.1) == 1797
        assert lil_start_spec(0.5) == 541
        assert lil_start_spec(1 / math.e) == 780

    def test_values(self):
        assert lil_bound_spec(2000, 0.1) == pytest.approx(LIL_SPEC_2000, rel=1e-13)
        assert lil_bound_spec(3000, 0.1) == pytest.approx(LIL_SPEC_3000, rel=1e-13)

    def test_array_input(self):
        out = lil_bound_spec(np.array([2000, 3000]), 0.1)
        np.testing.assert_allclose(out, [LIL_SPEC_2000, LIL_SPEC_3000], rtol=1e-13)

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            lil_bound_spec(1796, 0.1)
        assert lil_bound_spec(1797, 0.1) > 0

    @pytest.mark.parametrize("delta", [0.0, 0.6, 1.0, -0.1, float("nan")])
    def test_delta_domain(self, delta):
        with pytest.raises(DomainError):
            lil_start_spec(delta)

    def test_growth_rate(self):
        for t in (2000.0, 10_000.0, 1e6):
            ratio = lil_bound_spec(4 * t, 0.1) / lil_bound_spec(t, 0.1)
            assert 1.9 < ratio < 2.1

    def test_monotone_in_delta(self):
        assert lil_bound_spec(5000, 0.01) > lil_bound_spec(5000, 0.1)


class TestLilGeneral:
    @pytest.mark.parametrize("alpha", sorted(KAPPA0))
    def test_kappa0(self, alpha):
        assert kappa0(alpha) == pytest.approx(KAPPA0[alpha], rel=1e-14)

    def test_kappa0_branch(self):
        # the max(., 0) branch switches off at alpha = 10 / (6 e^4)
        edge = 10 / (6 * math.e**4)
        below = kappa0(edge * 0.5)
        expected = (0.5 + 1 / (20 * math.e**8) - 0.4 * edge * 0.5 + 1 / (6 * math.e**4) - 0.05 * edge) / (1 - edge * 0.5)
        assert below == pytest.approx(expected, rel=1e-14)

    def test_start(self):
        assert lil_start_general(LilGeneralConfig(alpha=0.2, delta=0.1, k=0.25, kappa=0.6)) == 2947
        assert LilGeneralConfig(alpha=0.5, delta=0.1, k=0.1).start == 1452
        assert LilGeneralConfig(alpha=0.5, delta=0.1, k=0.1, kappa=0.9).start == 968

    def test_kappa_below_floor_rejected(self):
        with pytest.raises(ConfigurationError):
            LilGeneralConfig(alpha=0.2, delta=0.1, kappa=0.5)

    def test_default_kappa(self):
        assert LilGeneralConfig(alpha=0.25, delta=0.1).kappa == pytest.approx(KAPPA0[0.25])

    def test_cap_binds_near_start(self):
        cfg = LilGeneralConfig(alpha=0.25, delta=0.1)
        t = cfg.start
        assert lil_bound_general(t, cfg) == pytest.approx(2 * cfg.variance_scale * t / math.e**2, rel=1e-15)

    def test_floor_and_cap(self):
        cfg = LilGeneralConfig(alpha=0.2, delta=0.1)
        t = np.arange(cfg.start, cfg.start + 50_000, 97, dtype=float)
        out = lil_bound_general(t, cfg)
        assert np.all(out >= 1.0)
        assert np.all(out <= np.maximum(2 * cfg.variance_scale * t / math.e**2, 1.0) + 1e-12)

    def test_precondition(self):
        cfg = LilGeneralConfig(alpha=0.2, delta=0.1)
        with pytest.raises(PreconditionError):
            lil_bound_general(cfg.start - 1, cfg)

    def test_growth_rate(self):
        cfg = LilGeneralConfig(alpha=0.25, delta=0.1)
        for t in (1e5, 1e6, 1e7):
            assert 1.9 < cfg(4 * t) / cfg(t) < 2.1


def _knot(anchor, d):
    return math.sqrt(anchor / 2 * math.log(1 / d))


class TestLinear:
    def test_default_schedule(self):
        sched = build_hybrid_schedule(0.2, 0.1, 10)
        assert sched.linear.tau0 == pytest.approx(1.842068074395236547, rel=1e-14)
        assert sched.linear.p == 10
        assert sched.linear.deltas == [pytest.approx(0.01)] * 10
        assert sched.switch_time == 1797

    def test_knot_value(self):
        # single line anchored at 400 with Delta=0.01 touches sqrt(200 ln 100)
        sched = build_linear_schedule(1, 0.01, [400.0], 0.22)
        assert linear_bound_eval(sched, 400.0) == pytest.approx(30.348542587702927, rel=1e-14)
        assert sched.tau0 == pytest.approx(2 * 0.22 * math.log(100))
        assert math.isinf(sched.segments[0].tau_hi)

    def test_increasing(self):
        sched = build_hybrid_schedule(0.22, 0.1, 10).linear
        values = linear_bound_eval(sched, np.arange(3, 5000, dtype=float))
        assert np.all(np.diff(values) > 0)

    def test_hybrid_reference_values(self):
        sched = build_hybrid_schedule(0.22, 0.1, 10)
        assert sched.start == 3
        assert sched.linear.breakpoints[0] == pytest.approx(20.20468120079299, rel=1e-12)
        # extended-precision values on segments 2 and 6
        assert sched(100) == pytest.approx(16.114467476890285375, rel=1e-12)
        assert sched(1000) == pytest.approx(47.985262644954007421, rel=1e-12)

    def test_breakpoints_interleave(self):
        sched = build_hybrid_schedule(0.22, 0.1, 10).linear
        anchors, taus = sched.anchors, sched.breakpoints
        for j, tau in enumerate(taus):
            assert anchors[j] <= tau <= anchors[j + 1]

    def test_knots_and_continuity(self):
        sched = build_hybrid_schedule(0.22, 0.1, 10).linear
        for a, d in zip(sched.anchors, sched.deltas):
            assert linear_bound_eval(sched, a) == pytest.approx(_knot(a, d), rel=1e-12)
        for seg, nxt in zip(sched.segments, sched.segments[1:]):
            tau = seg.tau_hi
            assert seg.slope * tau + seg.intercept == pytest.approx(nxt.slope * tau + nxt.intercept, rel=1e-12)

    def test_minimum_of_lines(self):
        # on each segment the active line is the lowest of all lines
        sched = build_hybrid_schedule(0.22, 0.1, 10).linear
        t = np.linspace(sched.tau0, 3000, 2000)
        lines = np.array([s.slope * t + s.intercept for s in sched.segments])
        np.testing.assert_allclose(linear_bound_eval(sched, t), lines.min(axis=0), rtol=1e-12)

    def test_budget_overrun(self):
        with pytest.raises(ConfigurationError, match="exceeds"):
            build_linear_schedule(2, 0.1, [10.0, 100.0], 0.2, deltas=[0.06, 0.05])

    def test_bad_anchors(self):
        with pytest.raises(ConfigurationError, match="nondecreasing"):
            build_linear_schedule(2, 0.1, [100.0, 10.0], 0.2)
        with pytest.raises(ConfigurationError, match="expected 3 anchors"):
            build_linear_schedule(3, 0.1, [1.0, 2.0], 0.2)

    def test_interleaving_violation_names_j(self):
        # a tiny budget on the second line pushes its crossing with the first beyond t_2
        with pytest.raises(ConfigurationError, match="j=1"):
            build_linear_schedule(2, 0.1, [100.0, 101.0], 0.2, deltas=[0.09, 1e-9])

    def test_precondition_before_tau0(self):
        sched = build_hybrid_schedule(0.22, 0.1, 10).linear
        with pytest.raises(PreconditionError):
            linear_bound_eval(sched, 1.0)

    def test_equal_anchors(self):
        sched = build_linear_schedule(2, 0.1, [50.0, 50.0], 0.2)
        assert sched(50.0) == pytest.approx(_knot(50, 0.05), rel=1e-12)


class TestHybrid:
    def test_switch(self):
        sched = build_hybrid_schedule(0.22, 0.1, 10)
        assert isinstance(sched, HybridSchedule)
        assert hybrid_bound(1796, sched) == pytest.approx(linear_bound_eval(sched.linear, 1796))
        assert hybrid_bound(1797, sched) == pytest.approx(lil_bound_spec(1797, 0.1))
        assert linear_bound_eval(sched.linear, 1797) == pytest.approx(64.3253, abs=1e-4)
        assert hybrid_bound(1797, sched) == pytest.approx(71.5948, abs=1e-4)

    def test_curve_matches_pointwise(self):
        sched = build_hybrid_schedule(0.22, 0.1, 10)
        curve = sched.curve(2500)
        assert np.all(np.isinf(curve[:2]))
        t = np.arange(3, 2501)
        np.testing.assert_allclose(curve[2:], [sched(float(x)) for x in t], rtol=1e-15)

    def test_half_split(self):
        sched = build_hybrid_schedule(0.22, 0.1, 10, delta_split="half")
        assert sched.lil.delta == pytest.approx(0.05)
        assert math.fsum(sched.linear.deltas) == pytest.approx(0.05)
        assert sched.switch_time == lil_start_spec(0.05)

    def test_general_lil(self):
        sched = build_hybrid_schedule(0.25, 0.1, 10, lil="general")
        assert isinstance(sched.lil, LilGeneralConfig)
        assert sched.linear.anchors[-1] == sched.switch_time

    def test_phase_marks(self):
        marks = build_hybrid_schedule(0.22, 0.1, 10).phase_marks()
        assert set(marks) == {"tau0", "breakpoints", "s0_lil"}
        assert len(marks["breakpoints"]) == 9

    def test_p_one(self):
        sched = build_hybrid_schedule(0.22, 0.1, 1)
        assert sched.linear.anchors == [1797.0]

    def test_unknown_options(self):
        with pytest.raises(ConfigurationError):
            build_hybrid_schedule(0.22, 0.1, delta_split="third")
        with pytest.raises(ConfigurationError):
            build_hybrid_schedule(0.22, 0.1, lil="other")
        with pytest.raises(ConfigurationError):
            make_schedule("quadratic", 0.22, 0.1)


class TestFactory:
    def test_families(self):
        assert isinstance(make_schedule("lil", 0.22, 0.1), LilSpecConfig)
        linear = make_schedule("linear", 0.22, 0.1)
        assert math.isinf(linear.segments[-1].tau_hi)
        assert np.isfinite(linear(1e6))
        assert isinstance(make_schedule("hybrid", 0.22, 0.1), HybridSchedule)


class TestCoverage:
    @pytest.mark.slow
    def test_linear_phase_level(self, crossing_fraction):
        sched = build_hybrid_schedule(0.22, 0.1, 10)
        R = 10_000
        frac = crossing_fraction(sched.linear, 0.22, R, 1797, seed=11, t_max=1796)
        assert frac <= 0.1 + 3 * math.sqrt(0.09 / R)

    @pytest.mark.slow
    def test_lil_level(self, crossing_fraction):
        sched = LilSpecConfig(0.1)
        R = 2000
        frac = crossing_fraction(sched, 0.22, R, 10 * sched.start, seed=12)
        assert frac <= 0.1 + 3 * math.sqrt(0.09 / R)
