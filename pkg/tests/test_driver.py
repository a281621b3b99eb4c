from dataclasses import replace

import numpy as np
import pytest

from conftest import small_config
from ramcast.driver import initialize, run_ao, run_beamforming_ao
from ramcast.geometry import (
    ScenarioGeometry,
    aligned_pointing,
    arc_user_layout,
    boresight_vector,
    check_pointing,
)


def small_scenario(seed_spread=np.pi / 2, **overrides):
    cfg = small_config(**overrides)
    geo = arc_user_layout(cfg, 30.0, 8.0, seed_spread)
    return cfg, geo


class TestInitialize:
    def test_exact_power_budget(self):
        cfg, geo = small_scenario()
        for seed in range(5):
            w, f, z = initialize(cfg, geo, seed)
            total = np.sum(np.abs(w) ** 2)
            assert total == pytest.approx(cfg.transmit_power_budget, rel=1e-12)

    def test_aligned_start_is_feasible(self):
        cfg, geo = small_scenario()
        _, f, _ = initialize(cfg, geo, 0)
        np.testing.assert_array_equal(f, aligned_pointing(cfg.num_antennas))
        check_pointing(f, cfg.max_zenith, unit=True)

    def test_seed_determinism_bitwise(self):
        cfg, geo = small_scenario()
        w1, _, z1 = initialize(cfg, geo, 42)
        w2, _, z2 = initialize(cfg, geo, 42)
        assert np.array_equal(w1, w2)
        assert np.array_equal(z1, z2)


class TestRunAo:
    def test_single_link_closed_form(self):
        # one on-axis user, one antenna: optimum is the matched full-power link
        cfg = small_config(num_antennas=1, num_groups=1, group_sizes=[1])
        geo = ScenarioGeometry(np.zeros((1, 3)), np.array([[25.0, 0.0, 0.0]]),
                               np.array([0]))
        report = run_ao(cfg, geo, seed=0)
        expected = (cfg.transmit_power_budget * cfg.area * cfg.peak_gain
                    / (4 * np.pi * 25.0**2 * cfg.noise_power))
        assert report.min_sinr_post_norm == pytest.approx(expected, rel=0.01)

    def test_monotone_history_and_feasibility(self):
        cfg, geo = small_scenario()
        report = run_ao(cfg, geo, seed=1)
        h = report.min_sinr_history
        assert len(h) - 1 <= cfg.max_iterations
        for a, b in zip(h, h[1:]):
            assert b >= a * (1 - 1e-7) - 1e-7
        check_pointing(report.f, cfg.max_zenith, unit=True)
        assert np.sum(np.abs(report.w) ** 2) <= cfg.transmit_power_budget * (1 + 1e-9)

    def test_seed_determinism(self):
        cfg, geo = small_scenario()
        r1 = run_ao(cfg, geo, seed=3)
        r2 = run_ao(cfg, geo, seed=3)
        assert r1.min_sinr_history == r2.min_sinr_history
        assert np.array_equal(r1.w, r2.w)
        assert np.array_equal(r1.f, r2.f)

    def test_isotropic_gain_pointing_noop(self):
        cfg, geo = small_scenario()
        iso = replace(cfg, directivity_factor=0.0, peak_gain_override=1.0)
        full = run_ao(iso, geo, seed=2)
        bf_only = run_beamforming_ao(iso, geo, aligned_pointing(cfg.num_antennas), seed=2)
        assert full.min_sinr_history == bf_only.min_sinr_history
        np.testing.assert_array_equal(full.f, aligned_pointing(cfg.num_antennas))

    def test_reports_both_operating_points(self):
        cfg, geo = small_scenario()
        report = run_ao(cfg, geo, seed=0)
        assert report.min_sinr_pre_norm == report.min_sinr_history[-1]
        assert report.min_sinr_post_norm > 0
        assert report.termination in ("threshold", "max_iterations")

    def test_pointing_improves_over_fixed(self):
        cfg, geo = small_scenario()
        ra = run_ao(cfg, geo, seed=0)
        fixed = run_beamforming_ao(cfg, geo, aligned_pointing(cfg.num_antennas), seed=0)
        assert ra.min_sinr_post_norm >= fixed.min_sinr_post_norm * (1 - 1e-6)


class TestBeamformingOnly:
    def test_fixed_pointing_untouched(self):
        cfg, geo = small_scenario()
        f = boresight_vector(np.full(cfg.num_antennas, 0.4),
                             np.linspace(0, 3, cfg.num_antennas))
        report = run_beamforming_ao(cfg, geo, f, seed=0)
        np.testing.assert_allclose(report.f, f, atol=1e-12)

    def test_monotone(self):
        cfg, geo = small_scenario()
        report = run_beamforming_ao(cfg, geo, aligned_pointing(cfg.num_antennas), seed=5)
        h = report.min_sinr_history
        for a, b in zip(h, h[1:]):
            assert b >= a * (1 - 1e-7) - 1e-7
