"""SINR objective, its concave surrogate in the auxiliary variable, and the
closed-form auxiliary update.

The inner product is the plain transpose h^T w = sum_n h_n w_n (no conjugate);
keeping that convention verbatim avoids sign/conjugation drift between the
channel, the precoder updates, and the conic lowering.
"""

from __future__ import annotations

import numpy as np


def beam_products(h: np.ndarray, w: np.ndarray) -> np.ndarray:
    """(K, M) table of h_k^T w_j."""
    return h @ w


def sinr_all(w: np.ndarray, h: np.ndarray, group_of: np.ndarray, noise_power: float) -> np.ndarray:
    """(K,) SINR values |h^T w_m|^2 / (sum_{j != m} |h^T w_j|^2 + noise)."""
    x = beam_products(h, w)                       # (K, M)
    power = np.abs(x) ** 2
    k = np.arange(h.shape[0])
    signal = power[k, group_of]
    interference = power.sum(axis=1) - signal
    return signal / (interference + noise_power)


def sinr(w, h, group_of, noise_power, k: int) -> float:
    return float(sinr_all(w, h, group_of, noise_power)[k])


def min_sinr(w, h, group_of, noise_power) -> float:
    return float(sinr_all(w, h, group_of, noise_power).min())


def optimal_z_all(w: np.ndarray, h: np.ndarray, group_of: np.ndarray,
                  noise_power: float) -> np.ndarray:
    """(K,) closed-form maximizers z_k = h^T w_m / (interference + noise)."""
    x = beam_products(h, w)
    power = np.abs(x) ** 2
    k = np.arange(h.shape[0])
    signal_amp = x[k, group_of]
    interference = power.sum(axis=1) - power[k, group_of]
    return signal_amp / (interference + noise_power)


def optimal_z(w, h, group_of, noise_power, k: int) -> complex:
    return complex(optimal_z_all(w, h, group_of, noise_power)[k])


def surrogate_gamma_tilde_all(z: np.ndarray, w: np.ndarray, h: np.ndarray,
                              group_of: np.ndarray, noise_power: float) -> np.ndarray:
    """(K,) values of 2 Re{z* h^T w_m} - |z|^2 (interference + noise).

    Concave quadratic in z; equals the SINR exactly at z = optimal_z and never
    exceeds it elsewhere.
    """
    x = beam_products(h, w)
    power = np.abs(x) ** 2
    k = np.arange(h.shape[0])
    signal_amp = x[k, group_of]
    interference = power.sum(axis=1) - power[k, group_of]
    return 2 * np.real(np.conj(z) * signal_amp) - np.abs(z) ** 2 * (interference + noise_power)


def surrogate_gamma_tilde(z: complex, w, h, group_of, noise_power, k: int) -> float:
    zs = np.zeros(h.shape[0], dtype=complex)
    zs[k] = z
    return float(surrogate_gamma_tilde_all(zs, w, h, group_of, noise_power)[k])
