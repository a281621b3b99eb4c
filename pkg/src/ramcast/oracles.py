"""Independent brute-force and finite-difference certifiers.

These deliberately avoid the conic/surrogate code paths: the joint grid oracle
evaluates closed-form single-group optima over a dense boresight grid, and the
derivative suites difference the raw objective functions.

Grid resolution note: with 1 deg zenith and 2 deg azimuth steps the angular
distance from any feasible boresight to the nearest grid point is at most
about 1.2 deg = 0.021 rad, so the worst directional-factor loss at p = 5 is
1 - cos^10(0.021) < 0.3 percent, well inside the 2 percent acceptance band.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import surrogate
from .channel import channel_from_static, static_factor
from .config import SystemConfig
from .driver import run_ao
from .geometry import ScenarioGeometry, boresight_vector, upa_positions
from .harness import default_config
from .objective import optimal_z_all

GRID_ZENITH_STEP = np.deg2rad(1.0)
GRID_AZIMUTH_STEP = np.deg2rad(2.0)


@dataclass(frozen=True)
class OracleResult:
    instance: str
    oracle_value: float
    optimizer_value: float
    relative_gap: float          # (oracle - optimizer) / max(oracle, 1e-12), signed
    grid_error_bound: float
    passed: bool


def _boresight_grid(max_zenith: float):
    tz = np.arange(0.0, max_zenith + 1e-12, GRID_ZENITH_STEP)
    ta = np.arange(0.0, 2 * np.pi - 1e-12, GRID_AZIMUTH_STEP)
    tzg, tag = np.meshgrid(tz, ta, indexing="ij")
    f = boresight_vector(tzg.ravel(), tag.ravel())       # (3, G)
    return f, tzg.shape


def grid_search_joint(config: SystemConfig, geometry: ScenarioGeometry) -> tuple[float, float]:
    """Brute-force max-min SINR for single-group instances, plus a grid-error bound.

    Supported shapes (all with M = 1, where the optimal beamforming at fixed
    pointing is closed form): K = 1 with any N (matched filter, the objective
    separates per antenna) and N = 1 with any K (scalar beamformer, value
    Pt * min_k |h_k|^2 / sigma^2). Returns (optimum, adjacent-cell error bound).
    """
    if config.num_groups != 1:
        raise ValueError("joint grid oracle requires a single group")
    k_users, n_ant = geometry.num_users, geometry.num_antennas
    p = config.directivity_factor
    scale = config.transmit_power_budget / config.noise_power
    amp2 = config.area * config.peak_gain / (4 * np.pi * geometry.link_distance**2)
    f_grid, grid_shape = _boresight_grid(config.max_zenith)

    def neighbor_best(values_2d: np.ndarray, it: int, ia: int) -> float:
        best = -np.inf
        for dt, da in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            jt, ja = it + dt, (ia + da) % values_2d.shape[1]
            if 0 <= jt < values_2d.shape[0]:
                best = max(best, values_2d[jt, ja])
        return best

    if k_users == 1:
        # ||h||^2 = sum_n amp2_n psi_n^(2p): each antenna maximizes on its own.
        value, bound = 0.0, 0.0
        for n in range(n_ant):
            psi = f_grid.T @ geometry.link_direction[0, n]
            gains = (amp2[0, n] * np.maximum(psi, 0.0) ** (2 * p)).reshape(grid_shape)
            it, ia = np.unravel_index(np.argmax(gains), grid_shape)
            value += gains[it, ia]
            bound += gains[it, ia] - neighbor_best(gains, it, ia)
        return scale * value, scale * bound
    if n_ant == 1:
        psi = f_grid.T @ geometry.link_direction[:, 0].T          # (G, K)
        gains = amp2[:, 0] * np.maximum(psi, 0.0) ** (2 * p)      # (G, K)
        values = gains.min(axis=1).reshape(grid_shape)
        it, ia = np.unravel_index(np.argmax(values), grid_shape)
        bound = values[it, ia] - neighbor_best(values, it, ia)
        return scale * float(values[it, ia]), scale * float(bound)
    raise ValueError("joint grid oracle supports K = 1 or N = 1 instances only")


def tiny_instances() -> list[tuple[str, SystemConfig, ScenarioGeometry]]:
    """Three single-group geometries small enough for the joint grid oracle."""
    base = default_config(num_groups=1, group_sizes=[1], num_antennas=1)

    def user_at(zenith_deg, azimuth_deg, radius):
        return radius * boresight_vector(np.deg2rad(zenith_deg), np.deg2rad(azimuth_deg))

    out = []
    cfg = base
    geo = ScenarioGeometry(upa_positions(1, cfg.spacing),
                           user_at(75.0, 20.0, 30.0)[None, :], np.array([0]))
    out.append(("single-user-outside-cone", cfg, geo))

    cfg = replace(base, group_sizes=(2,))
    users = np.vstack([user_at(40.0, 60.0, 40.0), user_at(40.0, 120.0, 40.0)])
    geo = ScenarioGeometry(upa_positions(1, cfg.spacing), users, np.array([0, 0]))
    out.append(("mirror-pair", cfg, geo))

    cfg = replace(base, num_antennas=2)
    geo = ScenarioGeometry(upa_positions(2, cfg.spacing),
                           user_at(30.0, 200.0, 25.0)[None, :], np.array([0]))
    out.append(("two-element-single-user", cfg, geo))
    return out


def oracle_suite(seed: int = 0, tolerance: float = 0.02) -> list[OracleResult]:
    """run_ao against the joint grid optimum on every tiny instance."""
    results = []
    for name, config, geometry in tiny_instances():
        oracle_value, bound = grid_search_joint(config, geometry)
        report = run_ao(config, geometry, seed)
        value = report.min_sinr_post_norm
        gap = (oracle_value - value) / max(oracle_value, 1e-12)
        passed = value >= oracle_value * (1 - tolerance) and \
            value <= oracle_value + bound + 1e-9 * oracle_value
        results.append(OracleResult(name, oracle_value, value, gap, bound, passed))
    return results


# ---------------------------------------------------------------------------
# Random feasible instances shared by the derivative and curvature suites.
# ---------------------------------------------------------------------------

def random_instance(rng: np.random.Generator, p: float, min_psi: float = 0.0,
                    n_ant: int | None = None, m_groups: int | None = None) -> dict:
    n = n_ant if n_ant is not None else int(rng.integers(1, 5))
    m = m_groups if m_groups is not None else int(rng.integers(1, 4))
    sizes = tuple(int(rng.integers(1, 3)) for _ in range(m))
    config = default_config(num_antennas=n, num_groups=m, group_sizes=list(sizes),
                            directivity_factor=p)
    k = config.num_users
    zen = rng.uniform(np.deg2rad(5), np.deg2rad(70), size=k)
    azi = rng.uniform(0, 2 * np.pi, size=k)
    radius = rng.uniform(10, 60, size=k)
    users = (radius * boresight_vector(zen, azi)).T
    group_of = np.repeat(np.arange(m), sizes)
    geometry = ScenarioGeometry(upa_positions(n, config.spacing), users, group_of)

    f = sample_feasible_pointing(rng, geometry, config.max_zenith, min_psi)
    w = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2)
    w *= np.sqrt(config.transmit_power_budget / np.sum(np.abs(w) ** 2))
    static = static_factor(geometry, config)
    h = channel_from_static(static, f, geometry, p).coefficients
    z = optimal_z_all(w, h, group_of, config.noise_power)
    return {"config": config, "geometry": geometry, "f": f, "w": w, "z": z,
            "static": static, "group_of": group_of}


def sample_feasible_pointing(rng, geometry, max_zenith, min_psi, tries: int = 200):
    """Random in-cone boresights with every incidence cosine >= min_psi.

    Shrinks the zenith range toward the aligned pointing on failure; alignment
    always satisfies the bound for the front-half-space layouts built here.
    """
    zmax = max_zenith
    for _ in range(tries):
        f = boresight_vector(rng.uniform(0, zmax, geometry.num_antennas),
                             rng.uniform(0, 2 * np.pi, geometry.num_antennas))
        if surrogate.incidence_cosines(f, geometry).min() >= min_psi:
            return f
        zmax *= 0.8
    raise RuntimeError("could not sample a pointing matrix meeting the psi bound")


# ---------------------------------------------------------------------------
# Finite-difference certification of gradients and Hessian blocks.
# ---------------------------------------------------------------------------

def _fd_grad(fun, f: np.ndarray, h: float = 1e-6) -> np.ndarray:
    g = np.zeros(f.size)
    flat = f.reshape(-1, order="F")
    for i in range(flat.size):
        e = np.zeros_like(flat)
        e[i] = h
        fp = fun((flat + e).reshape(f.shape, order="F"))
        fm = fun((flat - e).reshape(f.shape, order="F"))
        g[i] = (fp - fm) / (2 * h)
    return g


def _fd_hessian(fun, f: np.ndarray, h: float = 1e-4) -> np.ndarray:
    flat = f.reshape(-1, order="F")
    n = flat.size
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            ei = np.zeros(n); ei[i] = h
            ej = np.zeros(n); ej[j] = h

            def at(v):
                return fun(v.reshape(f.shape, order="F"))

            val = (at(flat + ei + ej) - at(flat + ei - ej)
                   - at(flat - ei + ej) + at(flat - ei - ej)) / (4 * h * h)
            out[i, j] = out[j, i] = val
    return out


def _compare(analytic: np.ndarray, numeric: np.ndarray, char_scale: float) -> float:
    """Relative error, treating both-negligible-vs-instance-scale as exact.

    The zero-at-scale carve-out covers analytically vanishing quantities
    (e.g. the signal Hessian at p = 1), where the raw finite difference is
    pure cancellation noise.
    """
    na, nf = np.linalg.norm(analytic), np.linalg.norm(numeric)
    if max(na, nf) <= 1e-6 * char_scale:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / max(na, nf))


@dataclass(frozen=True)
class SuiteReport:
    passed: bool
    cases: int
    worst_gradient_error: float
    worst_hessian_error: float
    notes: str = ""


def finite_difference_suite(seed: int = 0, instances: int = 100,
                            grad_tol: float = 1e-6, hess_tol: float = 1e-4) -> SuiteReport:
    """Central-difference check of the signal/interference gradients and
    Hessian blocks on random feasible instances with psi >= 0.05."""
    rng = np.random.default_rng(seed)
    p_choices = [0.5, 1.0, 2.0, 3.0, 5.0]
    worst_g, worst_h = 0.0, 0.0
    for case in range(instances):
        p = p_choices[case % len(p_choices)]
        inst = random_instance(rng, p, min_psi=0.05)
        geo, cfg, st = inst["geometry"], inst["config"], inst["static"]
        f, w, z, group_of = inst["f"], inst["w"], inst["z"], inst["group_of"]

        for k in range(geo.num_users):
            m = group_of[k]
            c_scale = float(np.abs(surrogate.signal_weights(z, w, st, group_of)[k]).sum())
            char_u = (1 + p) ** 2 * c_scale

            def u_fun(fm, k=k, m=m):
                return 2 * np.real(np.conj(z[k]) * surrogate.beam_inner(
                    fm, w[:, m], k, st, geo, p))

            g_an = surrogate.grad_u(f, w, z, k, st, geo, group_of, p).reshape(-1)
            worst_g = max(worst_g, _compare(g_an, _fd_grad(u_fun, f), char_u))
            for j in range(cfg.num_groups):
                if j == m:
                    continue

                def a_fun(fm, k=k, j=j):
                    return np.abs(surrogate.beam_inner(fm, w[:, j], k, st, geo, p)) ** 2

                v_sum = float(np.abs(st[k] * w[:, j]).sum())
                char_a = (1 + p) ** 2 * v_sum * (
                    abs(surrogate.beam_inner(f, w[:, j], k, st, geo, p)) + v_sum)
                g_an = surrogate.grad_a(f, w, k, j, st, geo, p).reshape(-1)
                worst_g = max(worst_g, _compare(g_an, _fd_grad(a_fun, f), char_a))

        # Hessians on one user per instance keeps the suite inside its budget.
        k = int(rng.integers(0, geo.num_users))
        m = group_of[k]
        c_scale = float(np.abs(surrogate.signal_weights(z, w, st, group_of)[k]).sum())
        char_u = (1 + p) ** 2 * c_scale

        def u_fun(fm, k=k, m=m):
            return 2 * np.real(np.conj(z[k]) * surrogate.beam_inner(fm, w[:, m], k, st, geo, p))

        blocks = surrogate.hessian_u_blocks(f, w, z, k, st, geo, group_of, p)
        h_an = np.zeros((3 * geo.num_antennas, 3 * geo.num_antennas))
        for n in range(geo.num_antennas):
            h_an[3 * n:3 * n + 3, 3 * n:3 * n + 3] = blocks[n]
        worst_h = max(worst_h, _compare(h_an, _fd_hessian(u_fun, f), char_u))
        for j in range(cfg.num_groups):
            if j == m:
                continue

            def a_fun(fm, k=k, j=j):
                return np.abs(surrogate.beam_inner(fm, w[:, j], k, st, geo, p)) ** 2

            v_sum = float(np.abs(st[k] * w[:, j]).sum())
            char_a = (1 + p) ** 2 * v_sum * (
                abs(surrogate.beam_inner(f, w[:, j], k, st, geo, p)) + v_sum)
            ab = surrogate.hessian_a_blocks(f, w, k, j, st, geo, p)
            h_an = ab.transpose(0, 2, 1, 3).reshape(3 * geo.num_antennas, 3 * geo.num_antennas)
            worst_h = max(worst_h, _compare(h_an, _fd_hessian(a_fun, f), char_a))

    return SuiteReport(worst_g < grad_tol and worst_h < hess_tol, instances,
                       worst_g, worst_h)


# ---------------------------------------------------------------------------
# Curvature-constant sampling: Hessian norms vs the returned bounds.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LipschitzReport:
    passed: bool
    samples: int
    min_signal_margin: float        # min over samples of (L - norm) / max(L, eps)
    min_interference_margin: float
    notes: str = ""


def lipschitz_sampling_suite(seed: int = 0, samples_per_p: int = 100,
                             p_values=(1.0, 2.0, 5.0)) -> LipschitzReport:
    """Sample feasible pointings (psi >= psi_floor) and verify that the
    spectral norm of the signal Hessian and the block-row sum of each
    interference Hessian never exceed the constants evaluated there."""
    rng = np.random.default_rng(seed)
    tiny = 1e-12
    min_sm, min_im = np.inf, np.inf
    total = 0
    for p in p_values:
        inst = random_instance(rng, p, min_psi=surrogate.PSI_FLOOR,
                               n_ant=3, m_groups=2)
        geo, cfg, st = inst["geometry"], inst["config"], inst["static"]
        w, z, group_of = inst["w"], inst["z"], inst["group_of"]
        for _ in range(samples_per_p):
            f = sample_feasible_pointing(rng, geo, cfg.max_zenith, surrogate.PSI_FLOOR)
            total += 1
            for k in range(geo.num_users):
                m = group_of[k]
                blocks = surrogate.hessian_u_blocks(f, w, z, k, st, geo, group_of, p)
                norm = max((np.linalg.norm(b, 2) for b in blocks), default=0.0)
                bound = surrogate.lipschitz_signal(f, w, z, k, st, geo, group_of, p)
                min_sm = min(min_sm, (bound - norm) / max(bound, tiny))
                for j in range(cfg.num_groups):
                    if j == m:
                        continue
                    ab = surrogate.hessian_a_blocks(f, w, k, j, st, geo, p)
                    row_norms = np.linalg.norm(ab, ord=2, axis=(2, 3))
                    row_sum = float(row_norms.sum(axis=1).max())
                    bound = surrogate.lipschitz_interference(f, w, k, j, st, geo, p)
                    min_im = min(min_im, (bound - row_sum) / max(bound, tiny))
    passed = min_sm >= -1e-9 and min_im >= -1e-9
    return LipschitzReport(passed, total, float(min_sm), float(min_im))
