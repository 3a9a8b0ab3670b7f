import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from normpde import (CausalDrive, CausalFact, ConfigurationError, KernelField, KernelParams,
                     TargetDrivenConfig, adaptation_factor, causal_update, net_causal_effect,
                     read_facts, target_driven_update, time_amplification)
from normpde.adaptation import MU_GUARD, causal_increment

BOUNDED = KernelParams(-5.0, 0.1, mu_min=-5.0, mu_max=5.0, sigma_min=0.1, sigma_max=3.0)


class TestScalarMaps:
    def test_time_amplification(self):
        assert time_amplification(0) == 1.0
        assert time_amplification(100) == 2.0
        with pytest.raises(ValueError):
            time_amplification(-1.0)

    def test_adaptation_factor(self):
        assert adaptation_factor(0.5) == 0.5
        assert adaptation_factor(0.0) == pytest.approx(0.26894142136999512, rel=1e-15)
        with pytest.raises(ValueError):
            adaptation_factor(-0.1)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0, 50), st.floats(0, 50))
    def test_factor_monotone_in_unit_interval(self, a, b):
        fa, fb = adaptation_factor(a), adaptation_factor(b)
        assert 0 < fa <= 1 and 0 < fb <= 1
        if a <= b:
            assert fa <= fb


class TestFacts:
    def test_net_effect(self):
        facts = [CausalFact("a", 0.5, 0.02), CausalFact("b", -0.2, 0.01), ("c", 1.0, -0.004)]
        assert net_causal_effect(facts) == pytest.approx(0.01 - 0.002 - 0.004)

    def test_drive_from_facts(self):
        drive = CausalDrive.from_facts([CausalFact("a", 2.0, 0.5)], delta_sigma=0.0)
        assert drive.delta_mu == 1.0
        assert len(drive.facts) == 1

    def test_read_facts(self, tmp_path):
        p = tmp_path / "facts.csv"
        p.write_text("# synthetic\nfact,effect_size_value,causal_effect\n"
                     "x,0.4,0.01\ny,0.1,-0.02\n")
        facts = read_facts(p)
        assert [f.name for f in facts] == ["x", "y"]
        assert net_causal_effect(facts) == pytest.approx(0.002)

    def test_read_facts_errors(self, tmp_path):
        p = tmp_path / "facts.csv"
        p.write_text("fact,effect\nx,1\n")
        with pytest.raises(ConfigurationError, match="header"):
            read_facts(p)
        p.write_text("fact,effect_size_value,causal_effect\nx,abc,1\n")
        with pytest.raises(ConfigurationError, match=":2:"):
            read_facts(p)


class TestTargetDriven:
    def test_validation(self):
        with pytest.raises(ConfigurationError, match="eta"):
            TargetDrivenConfig(0.0, 0.1)
        with pytest.raises(ConfigurationError, match="tau"):
            TargetDrivenConfig(0.1, -1.0)

    def test_increment(self):
        k = target_driven_update(KernelParams(0.5, 1.0), 2.0, TargetDrivenConfig(0.01, 0.1))
        assert k.mu == pytest.approx(0.52)
        assert k.sigma == pytest.approx(1.02)

    def test_fixed_point_below_tau(self):
        cfg = TargetDrivenConfig(0.01, 3.0)
        assert target_driven_update(BOUNDED, 2.9, cfg) is BOUNDED
        assert target_driven_update(BOUNDED, 3.0, cfg) is BOUNDED

    def test_clipped_to_bounds(self):
        k = BOUNDED
        for _ in range(1000):
            k = target_driven_update(k, 10.0, TargetDrivenConfig(0.05, 0.0))
        assert k.mu == 5.0 and k.sigma == 3.0

    def test_skips_mu_zero(self):
        k = KernelParams(-0.01, 1.0)
        out = target_driven_update(k, 1.0, TargetDrivenConfig(0.01, 0.0))
        assert out.mu == MU_GUARD

    def test_per_node(self):
        kf = KernelField(np.array([-1.0, 0.0 - 1e-3, 4.99]), np.ones(3), mu_max=5.0)
        out = target_driven_update(kf, 0.1, TargetDrivenConfig(0.01, 0.0))
        np.testing.assert_allclose(out.mu, [-0.999, MU_GUARD, 4.991])


class TestCausal:
    def test_matches_closed_form_integral(self):
        drive = CausalDrive(0.003, 0.001)
        G = np.full(100, 0.02)
        dx = 0.4
        k = KernelParams(0.5, 1.0)
        dt, T = 0.01, 100.0
        for n in range(int(round(T / dt))):
            k = causal_update(k, drive, G, dt, n * dt, dx)
        s = math.sqrt(np.sum(G**2) * dx)
        integral = adaptation_factor(s) * (T + 0.005 * T**2)
        assert k.mu - 0.5 == pytest.approx(0.003 * integral, rel=5e-3)
        assert k.sigma - 1.0 == pytest.approx(0.001 * integral, rel=5e-3)

    def test_increment_formula(self):
        assert causal_increment(0.01, 0.5, 0.1, 100.0) == pytest.approx(0.01 * 0.5 * 0.1 * 2.0)

    def test_per_node_shares_increment(self):
        kf = KernelField(np.array([0.5, -0.3, 1.0]), np.ones(3))
        out = causal_update(kf, CausalDrive(0.1, 0.0), np.zeros(3), 1.0, 0.0, 1.0)
        np.testing.assert_allclose(out.mu - kf.mu, 0.1 * adaptation_factor(0.0))
        np.testing.assert_array_equal(out.sigma, kf.sigma)

    def test_zero_drive_returns_same_kernel(self):
        k = KernelParams(0.5, 1.0)
        assert causal_update(k, CausalDrive(0.0, 0.0), np.ones(5), 0.1, 0.0, 1.0) is k

    def test_clip(self):
        k = KernelParams(0.5, 1.0, sigma_max=1.05)
        out = causal_update(k, CausalDrive(0.0, 1.0), np.zeros(5), 1.0, 0.0, 1.0)
        assert out.sigma == 1.05

    def test_bad_dt(self):
        with pytest.raises(ValueError):
            causal_update(KernelParams(0.5, 1.0), CausalDrive(0.1, 0.0), np.zeros(3), 0.0, 0, 1)
