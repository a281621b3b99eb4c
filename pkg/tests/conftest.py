import time

import pytest

from ramcast import harness
from ramcast.driver import run_ao


@pytest.fixture(scope="session")
def default_scenario():
    params = dict(harness.DEFAULT_SCENARIO)
    config, geometry = harness.build_scenario(params)
    return config, geometry


@pytest.fixture(scope="session")
def default_ra_reports(default_scenario):
    """Twenty optimized runs on the baseline scenario, shared by the
    acceptance checks (monotone ascent, dominance, rotation-range trend,
    curvature-safety) so the expensive part is paid once."""
    config, geometry = default_scenario
    t0 = time.perf_counter()
    reports = [run_ao(config, geometry, seed) for seed in range(20)]
    elapsed = time.perf_counter() - t0
    return reports, elapsed


def small_config(**overrides):
    """Fast desk-scale configuration for module-level driver tests."""
    defaults = dict(num_antennas=2, num_groups=2, group_sizes=[1, 1],
                    sca_inner_iterations=50, sca_inner_threshold=1e-4)
    defaults.update(overrides)
    return harness.default_config(**defaults)
