"""Experiment harness: benchmark schemes, parameter sweeps, CSV persistence,
and the JSON config boundary (the only place dBm exists).
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import SystemConfig
from .driver import run_ao, run_beamforming_ao
from .geometry import ScenarioGeometry, aligned_pointing, arc_user_layout, random_pointing

SCHEME_KINDS = ("ra_optimized", "fixed_directional", "random_orientation", "isotropic")
CSV_HEADER = "axis_value,scheme,seed,min_sinr_linear,min_sinr_db,iterations,wall_ms"

AXIS_POWER = "transmit_power_dbm"
AXIS_SPREAD = "user_spread_rad"
AXIS_ANTENNAS = "num_antennas"
AXIS_DIRECTIVITY = "directivity_factor"
AXES = (AXIS_POWER, AXIS_SPREAD, AXIS_ANTENNAS, AXIS_DIRECTIVITY)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def watts_to_dbm(watts: float) -> float:
    return 10.0 * np.log10(watts * 1000.0)


# Baseline simulation point: 2.4 GHz, -94 dBm noise, 15 dBm budget, four
# half-wavelength-spaced elements serving two groups of two arc users.
DEFAULT_SCENARIO = {
    "carrier_frequency_hz": 2.4e9,
    "noise_power_dbm": -94.0,
    "transmit_power_dbm": 15.0,
    "directivity_factor": 5.0,
    "max_zenith_rad": np.pi / 3,
    "num_antennas": 4,
    "num_groups": 2,
    "group_sizes": [2, 2],
    "element_spacing_m": None,
    "element_area_m2": None,
    "convergence_threshold": 1e-3,
    "max_iterations": 30,
    "sca_inner_iterations": 600,
    "sca_inner_threshold": 5e-6,
    "arc_radius_m": 50.0,
    "bs_height_m": 10.0,
    "user_spread_rad": 2 * np.pi / 3,
    "random_orientation_draws": 100,
}

_CONFIG_TYPES = {
    "carrier_frequency_hz": (int, float),
    "noise_power_dbm": (int, float),
    "transmit_power_dbm": (int, float),
    "directivity_factor": (int, float),
    "max_zenith_rad": (int, float),
    "num_antennas": (int,),
    "num_groups": (int,),
    "group_sizes": (list,),
    "element_spacing_m": (int, float, type(None)),
    "element_area_m2": (int, float, type(None)),
    "convergence_threshold": (int, float),
    "max_iterations": (int,),
    "sca_inner_iterations": (int,),
    "sca_inner_threshold": (int, float),
    "arc_radius_m": (int, float),
    "bs_height_m": (int, float),
    "user_spread_rad": (int, float),
    "random_orientation_draws": (int,),
}


def default_config(**overrides) -> SystemConfig:
    params = dict(DEFAULT_SCENARIO)
    params.update(overrides)
    return _to_system_config(params)


def _to_system_config(params: dict) -> SystemConfig:
    return SystemConfig(
        carrier_frequency=float(params["carrier_frequency_hz"]),
        noise_power=dbm_to_watts(float(params["noise_power_dbm"])),
        transmit_power_budget=dbm_to_watts(float(params["transmit_power_dbm"])),
        directivity_factor=float(params["directivity_factor"]),
        max_zenith=float(params["max_zenith_rad"]),
        num_antennas=int(params["num_antennas"]),
        num_groups=int(params["num_groups"]),
        group_sizes=tuple(int(g) for g in params["group_sizes"]),
        element_spacing=params.get("element_spacing_m"),
        element_area=params.get("element_area_m2"),
        convergence_threshold=float(params["convergence_threshold"]),
        max_iterations=int(params["max_iterations"]),
        sca_inner_iterations=int(params["sca_inner_iterations"]),
        sca_inner_threshold=float(params["sca_inner_threshold"]),
    )


class ConfigError(ValueError):
    pass


def load_config_json(path) -> dict:
    """Validated scenario parameters; unknown keys and type mismatches fail fast."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    params = dict(DEFAULT_SCENARIO)
    for key, value in raw.items():
        if key not in _CONFIG_TYPES:
            raise ConfigError(f"{path}: unknown config key '{key}'")
        if not isinstance(value, _CONFIG_TYPES[key]) or isinstance(value, bool):
            raise ConfigError(f"{path}: key '{key}' has the wrong type")
        params[key] = value
    return params


def build_scenario(params: dict) -> tuple[SystemConfig, ScenarioGeometry]:
    config = _to_system_config(params)
    geometry = arc_user_layout(config, float(params["arc_radius_m"]),
                               float(params["bs_height_m"]),
                               float(params["user_spread_rad"]))
    return config, geometry


@dataclass(frozen=True)
class SchemeVariant:
    """A benchmark scheme plus an optional rotation-range override.

    The CSV `scheme` column carries ``label`` so e.g. several max-zenith
    variants of the optimized scheme can coexist in one sweep.
    """

    kind: str
    label: str | None = None
    max_zenith: float | None = None

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind '{self.kind}'")

    @property
    def csv_label(self) -> str:
        return self.label if self.label is not None else self.kind


DEFAULT_VARIANTS = tuple(SchemeVariant(kind) for kind in SCHEME_KINDS)


@dataclass(frozen=True)
class ExperimentSpec:
    params: dict                     # scenario parameters (DEFAULT_SCENARIO schema)
    axis: str
    grid: tuple[float, ...]
    seeds: tuple[int, ...]
    out: str
    variants: tuple[SchemeVariant, ...] = DEFAULT_VARIANTS

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"unknown sweep axis '{self.axis}'")
        if len(self.grid) == 0:
            raise ValueError("sweep grid must be nonempty")
        if len(self.seeds) < 1:
            raise ValueError("need at least one seed")


@dataclass(frozen=True)
class SchemeResult:
    min_sinr_linear: float
    min_sinr_db: float
    iterations: int
    wall_ms: float


def run_scheme(kind: str, config: SystemConfig, geometry: ScenarioGeometry,
               seed: int, random_draws: int = 100,
               max_zenith: float | None = None) -> SchemeResult:
    """Run one benchmark scheme and report its operating min-SINR."""
    if kind not in SCHEME_KINDS:
        raise ValueError(f"unknown scheme kind '{kind}'")
    if max_zenith is not None:
        config = replace(config, max_zenith=max_zenith)
    t0 = time.perf_counter()

    if kind == "ra_optimized":
        report = run_ao(config, geometry, seed)
        value, iters = report.min_sinr_post_norm, report.iterations
    elif kind == "fixed_directional":
        report = run_beamforming_ao(config, geometry,
                                    aligned_pointing(config.num_antennas), seed)
        value, iters = report.min_sinr_post_norm, report.iterations
    elif kind == "isotropic":
        iso = replace(config, directivity_factor=0.0, peak_gain_override=1.0)
        report = run_beamforming_ao(iso, geometry,
                                    aligned_pointing(config.num_antennas), seed)
        value, iters = report.min_sinr_post_norm, report.iterations
    else:  # random_orientation: average over independent boresight draws
        values, iter_counts = [], []
        for draw in range(random_draws):
            rng = np.random.default_rng([seed, draw])
            f = random_pointing(config.num_antennas, config.max_zenith, rng)
            w_seed = int(rng.integers(0, 2**31 - 1))
            report = run_beamforming_ao(config, geometry, f, w_seed)
            values.append(report.min_sinr_post_norm)
            iter_counts.append(report.iterations)
        value = float(np.mean(values))        # linear-scale Monte-Carlo mean
        iters = int(round(np.mean(iter_counts)))

    wall_ms = (time.perf_counter() - t0) * 1e3
    return SchemeResult(value, 10 * np.log10(max(value, 1e-300)), iters, wall_ms)


def _apply_axis(params: dict, axis: str, value: float) -> dict:
    out = dict(params)
    if axis == AXIS_ANTENNAS:
        out[axis] = int(value)
    else:
        out[axis] = float(value)
    return out


def _run_task(payload: tuple) -> tuple:
    params, axis, value, variant, seed = payload
    config, geometry = build_scenario(_apply_axis(params, axis, value))
    result = run_scheme(variant.kind, config, geometry, seed,
                        random_draws=int(params["random_orientation_draws"]),
                        max_zenith=variant.max_zenith)
    return (value, variant.csv_label, seed, result.min_sinr_linear,
            result.min_sinr_db, result.iterations, result.wall_ms)


def _format_row(row: tuple) -> str:
    value, label, seed, lin, db, iters, wall = row
    return (f"{value:.9g},{label},{seed},{lin:.9g},{db:.9g},{iters},{wall:.9g}")


def _worker_count() -> int:
    env = os.environ.get("RA_OPT_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def sweep(spec: ExperimentSpec) -> list[tuple]:
    """Run the sweep, streaming sorted rows per grid point; also writes a
    sibling ``<stem>_mean.csv`` with the linear-scale mean over seeds."""
    out_path = Path(spec.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    workers = _worker_count()
    rows: list[tuple] = []
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.flush()
        for value in sorted(spec.grid):
            tasks = [(dict(spec.params), spec.axis, value, variant, seed)
                     for variant in spec.variants for seed in spec.seeds]
            if workers == 1 or len(tasks) == 1:
                results = [_run_task(t) for t in tasks]
            else:
                with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
                    results = list(pool.map(_run_task, tasks))
            results.sort(key=lambda r: (r[1], r[2]))
            for row in results:
                fh.write(_format_row(row) + "\n")
            fh.flush()
            rows.extend(results)

    mean_path = out_path.with_name(out_path.stem + "_mean.csv")
    with open(mean_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("axis_value,scheme,min_sinr_linear,min_sinr_db,num_seeds\n")
        keys = sorted({(r[0], r[1]) for r in rows})
        for value, label in keys:
            vals = [r[3] for r in rows if (r[0], r[1]) == (value, label) and np.isfinite(r[3])]
            if not vals:
                continue
            mean = float(np.mean(vals))
            fh.write(f"{value:.9g},{label},{mean:.9g},{10 * np.log10(max(mean, 1e-300)):.9g},{len(vals)}\n")
    return rows


def convergence_rows(config: SystemConfig, geometry: ScenarioGeometry, seed: int,
                     label: str) -> list[tuple]:
    """Per-iteration min-SINR history in the sweep row schema (axis = iteration)."""
    t0 = time.perf_counter()
    report = run_ao(config, geometry, seed)
    wall = (time.perf_counter() - t0) * 1e3
    rows = []
    for i, value in enumerate(report.min_sinr_history):
        rows.append((float(i), label, seed, value,
                     10 * np.log10(max(value, 1e-300)), report.iterations, wall))
    return rows


def write_rows(path, rows: list[tuple]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(_format_row(row) + "\n")
