"""Alternating optimization driver: precoder solves, auxiliary updates, the
pointing block (successive surrogate steps with auxiliary refresh and
curvature backtracking), convergence test, and the final unit-norm projection
plus one consistency re-solve of the precoders.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import conic, surrogate
from .channel import channel_from_static, static_factor
from .config import SystemConfig
from .geometry import ScenarioGeometry, aligned_pointing
from .objective import min_sinr, optimal_z_all

THRESHOLD = "threshold"
MAX_ITERATIONS = "max_iterations"
SUBPROBLEM_FAILURE = "subproblem_failure"


@dataclass
class AoReport:
    min_sinr_history: list[float]          # linear, entry 0 is the initial point
    per_iteration_ms: list[float]
    w: np.ndarray
    f: np.ndarray
    z: np.ndarray
    termination: str
    min_sinr_pre_norm: float
    min_sinr_post_norm: float
    backtrack_doublings: int = 0
    boresight_step_failures: int = 0
    solver_failures: int = 0

    @property
    def min_sinr_history_db(self) -> list[float]:
        return [10 * np.log10(max(v, 1e-300)) for v in self.min_sinr_history]

    @property
    def iterations(self) -> int:
        return len(self.min_sinr_history) - 1

    @property
    def min_sinr_db(self) -> float:
        return 10 * np.log10(max(self.min_sinr_post_norm, 1e-300))


def initialize(config: SystemConfig, geometry: ScenarioGeometry, seed: int):
    """Aligned pointing, circularly-symmetric Gaussian precoders rescaled to the
    exact power budget, and the closed-form auxiliary variables."""
    rng = np.random.default_rng(seed)
    n, m = config.num_antennas, config.num_groups
    w = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2)
    w *= np.sqrt(config.transmit_power_budget / np.sum(np.abs(w) ** 2))
    f = aligned_pointing(n)
    static = static_factor(geometry, config)
    h = channel_from_static(static, f, geometry, config.directivity_factor)
    z = optimal_z_all(w, h.coefficients, geometry.group_of, config.noise_power)
    return w, f, z


def _repair_power(w: np.ndarray, budget: float) -> np.ndarray:
    total = np.sum(np.abs(w) ** 2)
    if total > budget:
        w = w * np.sqrt(budget / total)
    return w


def _repair_pointing(f: np.ndarray, max_zenith: float) -> np.ndarray:
    """Clamp solver-tolerance leaks back onto the cone and into the unit ball."""
    f = f.copy()
    cos_max = np.cos(max_zenith)
    f[0, :] = np.minimum(np.maximum(f[0, :], cos_max), 1.0)
    norms = np.linalg.norm(f, axis=0)
    for n in np.nonzero(norms > 1.0)[0]:
        yz = f[1:, n]
        yz_cap = np.sqrt(max(1.0 - f[0, n] ** 2, 0.0))
        yz_norm = np.linalg.norm(yz)
        if yz_norm > yz_cap:
            f[1:, n] = yz * (yz_cap / yz_norm) if yz_norm > 0 else 0.0
    return f


def _solve_precoders(h: np.ndarray, z: np.ndarray, config: SystemConfig,
                     group_of: np.ndarray):
    program = conic.build_beamforming_program(h, z, group_of, config)
    out = conic.solve(program)
    if out.status not in (conic.OPTIMAL, conic.NEAR_OPTIMAL):
        return None
    w, _ = conic.unpack_beamforming(program, out.x)
    return _repair_power(w, config.transmit_power_budget)


@dataclass
class _BlockStats:
    doublings: int = 0
    step_failures: int = 0
    solver_failed: bool = False


def _surrogate_step(f, w, z, geometry, config, static, stats: _BlockStats):
    """One backtracked surrogate step; returns the accepted pointing or None."""
    bundle = surrogate.build_surrogates(f, w, z, geometry, config, static)
    if not bundle.grad.any() and not bundle.curvature.any():
        return f  # objective does not depend on the pointing (e.g. p = 0)
    for _ in range(surrogate.MAX_DOUBLINGS + 1):
        program = conic.build_boresight_program(bundle, config)
        out = conic.solve(program)
        if out.status not in (conic.OPTIMAL, conic.NEAR_OPTIMAL):
            stats.solver_failed = True
            return None
        f_cand, _ = conic.unpack_pointing(program, out.x)
        f_cand = _repair_pointing(f_cand, config.max_zenith)
        ok, bundle = surrogate.backtrack_curvature(bundle, f_cand, w, geometry,
                                                   config, static)
        if ok:
            return f_cand
        stats.doublings += 1
    stats.step_failures += 1
    return None


def _pointing_block(f, w, geometry, config, static, stats: _BlockStats):
    """Refine the pointing matrix at fixed precoders.

    Repeats {auxiliary refresh, surrogate build, convex step, backtracking}
    until the per-step fractional min-SINR gain falls below the inner
    threshold or the step cap is reached. Steps that fail to improve the true
    objective (solver noise) are rejected, so the block is nondecreasing.
    """
    p = config.directivity_factor
    group_of = geometry.group_of
    h = channel_from_static(static, f, geometry, p).coefficients
    value = min_sinr(w, h, group_of, config.noise_power)
    for _ in range(config.sca_inner_iterations):
        z = optimal_z_all(w, h, group_of, config.noise_power)
        f_new = _surrogate_step(f, w, z, geometry, config, static, stats)
        if f_new is None:
            break
        if f_new is f:
            break  # pointing-independent objective
        h_new = channel_from_static(static, f_new, geometry, p).coefficients
        value_new = min_sinr(w, h_new, group_of, config.noise_power)
        if value_new < value:
            break
        f, h = f_new, h_new
        done = (value_new - value) / max(value, 1e-12) < config.sca_inner_threshold
        value = value_new
        if done:
            break
    return f


def _normalize_pointing(f: np.ndarray) -> np.ndarray:
    f = f.copy()
    norms = np.linalg.norm(f, axis=0)
    degenerate = norms < 1e-12
    f[:, degenerate] = np.array([[1.0], [0.0], [0.0]])
    norms[degenerate] = 1.0
    return f / norms


def run_ao(config: SystemConfig, geometry: ScenarioGeometry, seed: int = 0,
           optimize_pointing: bool = True, f0: np.ndarray | None = None,
           w0: np.ndarray | None = None) -> AoReport:
    """Full alternating optimization from the aligned-pointing start.

    With ``optimize_pointing=False`` (or a fixed ``f0``) this degenerates to the
    precoder-only loop used by the benchmark schemes.
    """
    group_of = geometry.group_of
    static = static_factor(geometry, config)
    w, f, z = initialize(config, geometry, seed)
    if f0 is not None:
        f = f0.copy()
    if w0 is not None:
        w = w0.copy()
    p = config.directivity_factor
    h = channel_from_static(static, f, geometry, p).coefficients
    z = optimal_z_all(w, h, group_of, config.noise_power)

    gamma = min_sinr(w, h, group_of, config.noise_power)
    history = [gamma]
    per_iter_ms: list[float] = []
    termination = MAX_ITERATIONS
    doublings_total = 0
    step_failures = 0
    solver_failures = 0
    consecutive_failures = 0

    for _ in range(config.max_iterations):
        t0 = time.perf_counter()
        w_new = _solve_precoders(h, z, config, group_of)
        if w_new is None:
            solver_failures += 1
            consecutive_failures += 1
            if consecutive_failures >= 2:
                termination = SUBPROBLEM_FAILURE
                break
        else:
            # reject solver-noise regressions; an exact solve never decreases
            if min_sinr(w_new, h, group_of, config.noise_power) >= \
                    min_sinr(w, h, group_of, config.noise_power):
                w = w_new
            consecutive_failures = 0
        z = optimal_z_all(w, h, group_of, config.noise_power)

        if optimize_pointing:
            stats = _BlockStats()
            f = _pointing_block(f, w, geometry, config, static, stats)
            doublings_total += stats.doublings
            step_failures += stats.step_failures
            if stats.solver_failed:
                solver_failures += 1
                consecutive_failures += 1
                if consecutive_failures >= 2:
                    termination = SUBPROBLEM_FAILURE
                    break
            h = channel_from_static(static, f, geometry, p).coefficients
            z = optimal_z_all(w, h, group_of, config.noise_power)

        gamma_new = min_sinr(w, h, group_of, config.noise_power)
        history.append(gamma_new)
        per_iter_ms.append((time.perf_counter() - t0) * 1e3)
        fractional = (gamma_new - gamma) / max(gamma, 1e-12)
        gamma = gamma_new
        if fractional < config.convergence_threshold:
            termination = THRESHOLD
            break

    pre_norm = history[-1]
    f = _normalize_pointing(f)
    h = channel_from_static(static, f, geometry, p).coefficients
    w_refreshed = _solve_precoders(h, z, config, group_of)
    if w_refreshed is not None and \
            min_sinr(w_refreshed, h, group_of, config.noise_power) >= \
            min_sinr(w, h, group_of, config.noise_power):
        w = w_refreshed
    z = optimal_z_all(w, h, group_of, config.noise_power)
    post_norm = min_sinr(w, h, group_of, config.noise_power)

    return AoReport(
        min_sinr_history=history,
        per_iteration_ms=per_iter_ms,
        w=w, f=f, z=z,
        termination=termination,
        min_sinr_pre_norm=pre_norm,
        min_sinr_post_norm=post_norm,
        backtrack_doublings=doublings_total,
        boresight_step_failures=step_failures,
        solver_failures=solver_failures,
    )


def run_beamforming_ao(config: SystemConfig, geometry: ScenarioGeometry,
                       f: np.ndarray, seed: int = 0,
                       w0: np.ndarray | None = None) -> AoReport:
    """Precoder-only AO at a fixed unit-norm pointing matrix."""
    return run_ao(config, geometry, seed, optimize_pointing=False, f0=f, w0=w0)
