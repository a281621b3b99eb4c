"""Boresight-dependent line-of-sight channel with a cosine-power element pattern."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .geometry import ScenarioGeometry


def element_gain(cos_incidence, p: float, peak_gain: float | None = None):
    """Directional gain G0 * c^(2p) on the front half-space (c > 0), else 0.

    G0 = 2(2p+1) conserves radiated power over the sphere; pass ``peak_gain``
    to override it (isotropic benchmark uses 1 with p = 0).
    """
    c = np.asarray(cos_incidence, dtype=float)
    if np.any(c < -1 - 1e-12) or np.any(c > 1 + 1e-12):
        raise ValueError("cos_incidence outside [-1, 1]")
    g0 = 2.0 * (2.0 * p + 1.0) if peak_gain is None else peak_gain
    front = c > 0
    out = np.zeros_like(c)
    out[front] = g0 * c[front] ** (2.0 * p)
    return out if out.ndim else float(out)


def directional_factor(f: np.ndarray, geometry: ScenarioGeometry, p: float) -> np.ndarray:
    """(K, N) table of max(f_n . u_kn, 0)^p.

    The rear half-space is clamped to zero gain; with 0^0 = 1 the p = 0 channel
    is boresight-independent. Non-integer p with a clamped link is flagged
    because the unclamped power would be undefined there.
    """
    psi = np.einsum("cn,knc->kn", f, geometry.link_direction)
    clamped = psi <= 0
    if np.any(clamped) and p > 0 and not float(p).is_integer():
        warnings.warn(
            "rear-half-space link with non-integer directivity factor; "
            "gain clamped to zero",
            stacklevel=2,
        )
    return np.maximum(psi, 0.0) ** p


@dataclass(frozen=True)
class ChannelMatrix:
    """Per-link coefficients h = static_factor * max(f.u, 0)^p."""

    coefficients: np.ndarray   # (K, N) complex
    static_factor: np.ndarray  # (K, N) complex, boresight-independent part


def static_factor(geometry: ScenarioGeometry, config: SystemConfig) -> np.ndarray:
    """(K, N) complex amplitudes sqrt(S*G0/(4 pi d^2)) * exp(-j 2 pi d / lambda)."""
    d = geometry.link_distance
    amp = np.sqrt(config.area * config.peak_gain / (4 * np.pi * d**2))
    return amp * np.exp(-2j * np.pi * d / config.wavelength)


def channel_from_static(static: np.ndarray, f: np.ndarray,
                        geometry: ScenarioGeometry, p: float) -> ChannelMatrix:
    """Channel at pointing matrix ``f`` reusing precomputed static factors."""
    return ChannelMatrix(static * directional_factor(f, geometry, p), static)


def channel_matrix(geometry: ScenarioGeometry, f: np.ndarray,
                   config: SystemConfig) -> ChannelMatrix:
    if f.shape != (3, geometry.num_antennas):
        raise ValueError("pointing matrix must be 3 x N")
    return channel_from_static(
        static_factor(geometry, config), f, geometry, config.directivity_factor
    )
