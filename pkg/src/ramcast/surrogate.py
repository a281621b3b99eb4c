"""Surrogate construction for the boresight block: gradients, curvature
(Lipschitz-type) constants, the per-user concave lower bound, and the
backtracking safeguard that keeps the bound valid.

The desired-signal term u_k = sum_n c_kn psi_kn^p and the interference terms
a_kj = |x_kj|^2 are handled with second-order proximal surrogates sharing one
||F - F_prev||_F^2 regularizer; curvature constants are evaluated per iterate
with psi floored only inside negative exponents (they blow up as psi -> 0),
and backtracking doubles them whenever the bound check fails at a candidate.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .config import SystemConfig
from .geometry import ScenarioGeometry
from .objective import surrogate_gamma_tilde_all

PSI_FLOOR = 1e-3
BACKTRACK_SLACK = 1e-9
MAX_DOUBLINGS = 10


def incidence_cosines(f: np.ndarray, geometry: ScenarioGeometry) -> np.ndarray:
    """(K, N) table of psi_kn = f_n . u_kn (unclamped)."""
    return np.einsum("cn,knc->kn", f, geometry.link_direction)


def _clamped_pow(psi: np.ndarray, p: float) -> np.ndarray:
    return np.maximum(psi, 0.0) ** p


def _floored_pow(psi, expo: float, floor: float = PSI_FLOOR):
    """psi^expo with psi clamped below at ``floor`` iff the exponent is negative."""
    psi = np.asarray(psi, dtype=float)
    if expo < 0:
        return np.maximum(psi, floor) ** expo
    return np.maximum(psi, 0.0) ** expo


def beam_inner(f: np.ndarray, w_j: np.ndarray, k: int, static: np.ndarray,
               geometry: ScenarioGeometry, p: float) -> complex:
    """x_kj = sum_n static_kn w_jn max(psi_kn, 0)^p, identical to h_k^T w_j."""
    psi = incidence_cosines(f, geometry)[k]
    return complex(np.sum(static[k] * w_j * _clamped_pow(psi, p)))


def beam_inner_all(f: np.ndarray, w: np.ndarray, static: np.ndarray,
                   geometry: ScenarioGeometry, p: float) -> np.ndarray:
    """(K, M) table of x_kj."""
    psi_p = _clamped_pow(incidence_cosines(f, geometry), p)
    return (static * psi_p) @ w


def grad_directional_factor(f: np.ndarray, u: np.ndarray, p: float) -> np.ndarray:
    """Gradient of psi^p in f: p psi^(p-1) u, zero on the clamped half-space."""
    if p == 0:
        return np.zeros(3)
    psi = float(f @ u)
    if psi <= 0:
        return np.zeros(3)
    return p * psi ** (p - 1) * u


def _grad_factor_table(psi: np.ndarray, p: float) -> np.ndarray:
    """(K, N) table of p psi^(p-1), zero where psi <= 0 or p == 0."""
    if p == 0:
        return np.zeros_like(psi)
    out = np.zeros_like(psi)
    pos = psi > 0
    out[pos] = p * psi[pos] ** (p - 1)
    return out


def signal_weights(z: np.ndarray, w: np.ndarray, static: np.ndarray,
                   group_of: np.ndarray) -> np.ndarray:
    """(K, N) real weights c_kn = 2 Re{z_k* static_kn w_{m(k),n}}."""
    w_own = w[:, group_of].T                       # (K, N)
    return 2 * np.real(np.conj(z)[:, None] * static * w_own)


def grad_u(f, w, z, k, static, geometry, group_of, p) -> np.ndarray:
    """(N, 3) per-antenna gradient blocks of u_k = 2 Re{z* x_km}."""
    c = signal_weights(z, w, static, group_of)[k]
    psi = incidence_cosines(f, geometry)[k]
    gf = _grad_factor_table(psi[None, :], p)[0]
    return (c * gf)[:, None] * geometry.link_direction[k]


def grad_a(f, w, k, j, static, geometry, p) -> np.ndarray:
    """(N, 3) per-antenna gradient blocks of a_kj = |x_kj|^2."""
    x = beam_inner(f, w[:, j], k, static, geometry, p)
    d = 2 * np.real(np.conj(x) * static[k] * w[:, j])
    psi = incidence_cosines(f, geometry)[k]
    gf = _grad_factor_table(psi[None, :], p)[0]
    return (d * gf)[:, None] * geometry.link_direction[k]


def hessian_u_blocks(f, w, z, k, static, geometry, group_of, p) -> np.ndarray:
    """(N, 3, 3) diagonal blocks c_kn p(p-1) psi^(p-2) u u^T (off-diagonals vanish)."""
    c = signal_weights(z, w, static, group_of)[k]
    psi = incidence_cosines(f, geometry)[k]
    u = geometry.link_direction[k]
    blocks = np.zeros((psi.size, 3, 3))
    if p == 0 or p == 1:
        return blocks
    pos = psi > 0
    scal = np.zeros_like(psi)
    scal[pos] = c[pos] * p * (p - 1) * psi[pos] ** (p - 2)
    return scal[:, None, None] * np.einsum("na,nb->nab", u, u)


def hessian_a_blocks(f, w, k, j, static, geometry, p) -> np.ndarray:
    """(N, N, 3, 3) blocks of the interference-term Hessian.

    Diagonal: [2 Re{x* v_n} p(p-1) psi_n^(p-2) + 2 |v_n|^2 p^2 psi_n^(2p-2)] u_n u_n^T;
    off-diagonal (nt, n): 2 Re{v_n v_nt*} p^2 psi_n^(p-1) psi_nt^(p-1) u_nt u_n^T.
    """
    n_ant = static.shape[1]
    psi = incidence_cosines(f, geometry)[k]
    u = geometry.link_direction[k]
    v = static[k] * w[:, j]
    x = beam_inner(f, w[:, j], k, static, geometry, p)
    blocks = np.zeros((n_ant, n_ant, 3, 3))
    if p == 0:
        return blocks
    pos = psi > 0
    psi_pm1 = np.zeros(n_ant)
    psi_pm1[pos] = psi[pos] ** (p - 1)
    for nt in range(n_ant):
        for n in range(n_ant):
            if nt == n:
                if not pos[n]:
                    continue
                scal = 2 * p**2 * np.abs(v[n]) ** 2 * psi[n] ** (2 * p - 2)
                if p != 1:
                    scal += 2 * np.real(np.conj(x) * v[n]) * p * (p - 1) * psi[n] ** (p - 2)
                blocks[n, n] = scal * np.outer(u[n], u[n])
            else:
                scal = 2 * np.real(v[n] * np.conj(v[nt])) * p**2 * psi_pm1[n] * psi_pm1[nt]
                blocks[nt, n] = scal * np.outer(u[nt], u[n])
    return blocks


def lipschitz_signal(f, w, z, k, static, geometry, group_of, p,
                     psi_floor: float = PSI_FLOOR) -> float:
    """Curvature bound for u_k: max_n |c_kn psi_kn^(p-2)| * p |p-1|."""
    if p == 0:
        return 0.0
    c = signal_weights(z, w, static, group_of)[k]
    psi = incidence_cosines(f, geometry)[k]
    c_max = float(np.max(np.abs(c * _floored_pow(psi, p - 2, psi_floor))))
    return c_max * p * abs(p - 1)


def lipschitz_interference(f, w, k, j, static, geometry, p,
                           psi_floor: float = PSI_FLOOR) -> float:
    """Row-sum curvature bound for a_kj: 2p(|p-1|+p) V_max sum_n |v_n|."""
    if p == 0:
        return 0.0
    v_abs = np.abs(static[k] * w[:, j])
    psi = incidence_cosines(f, geometry)[k]
    v_max = float(np.max(v_abs * _floored_pow(psi, 2 * (p - 1), psi_floor)))
    return 2 * p * (abs(p - 1) + p) * v_max * float(v_abs.sum())


@dataclass(frozen=True)
class SurrogateBundle:
    """Everything needed to pose and audit one boresight step.

    ``const`` is the surrogate objective at the expansion point (tightness),
    ``grad`` the affine slope of the combined bound, and curvature constants
    stay separated per term so backtracking can inflate them exactly.
    """

    f_prev: np.ndarray            # (3, N) expansion point
    const: np.ndarray             # (K,) = gamma_tilde(z, W, F_prev)
    grad: np.ndarray              # (K, 3N), antenna-major xyz-minor
    lip_signal: np.ndarray        # (K,)
    lip_interference: np.ndarray  # (K, M), zero at the own-group column
    z: np.ndarray                 # (K,) complex
    noise_offset: np.ndarray      # (K,) = |z|^2 sigma^2
    signal_value: np.ndarray      # (K,) u_k(F_prev)
    interference_value: np.ndarray  # (K, M) a_kj(F_prev)

    @property
    def curvature(self) -> np.ndarray:
        """(K,) aggregated proximal constants L^S + |z|^2 sum_j L^I."""
        return self.lip_signal + np.abs(self.z) ** 2 * self.lip_interference.sum(axis=1)

    def lower_bound(self, f: np.ndarray) -> np.ndarray:
        """(K,) surrogate values at pointing matrix f."""
        delta = (f - self.f_prev).reshape(-1, order="F")
        return self.const + self.grad @ delta - 0.5 * self.curvature * float(delta @ delta)

    def inflated(self, factor: float = 2.0) -> "SurrogateBundle":
        return replace(self, lip_signal=self.lip_signal * factor,
                       lip_interference=self.lip_interference * factor)


def build_surrogates(f_prev: np.ndarray, w: np.ndarray, z: np.ndarray,
                     geometry: ScenarioGeometry, config: SystemConfig,
                     static: np.ndarray) -> SurrogateBundle:
    """Assemble the per-user surrogate data at expansion point ``f_prev``."""
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(z))):
        raise ValueError("nonfinite precoder or auxiliary values")
    p = config.directivity_factor
    group_of = geometry.group_of
    k_users, n_ant = static.shape
    m_groups = config.num_groups

    psi = incidence_cosines(f_prev, geometry)
    if np.any(np.all(psi <= 0, axis=0)):
        warnings.warn("an antenna sees every user in its rear half-space", stacklevel=2)

    psi_p = _clamped_pow(psi, p)
    h = static * psi_p
    x = h @ w                                        # (K, M)
    const = surrogate_gamma_tilde_all(z, w, h, group_of, config.noise_power)

    gf = _grad_factor_table(psi, p)                  # (K, N)
    c = signal_weights(z, w, static, group_of)       # (K, N)
    u_dir = geometry.link_direction                  # (K, N, 3)
    grad_u_blocks = (c * gf)[:, :, None] * u_dir     # (K, N, 3)

    # d[k, j, n] = 2 Re{x_kj* static_kn w_jn}
    d = 2 * np.real(np.conj(x)[:, :, None] * static[:, None, :] * w.T[None, :, :])
    grad_a_blocks = d[:, :, :, None] * (gf[:, None, :, None] * u_dir[:, None, :, :])

    own = (np.arange(m_groups)[None, :] == group_of[:, None])   # (K, M)
    zsq = np.abs(z) ** 2
    interf_grad = np.where(own[:, :, None, None], 0.0, grad_a_blocks).sum(axis=1)
    grad = (grad_u_blocks - zsq[:, None, None] * interf_grad).reshape(k_users, 3 * n_ant)

    lip_s = np.zeros(k_users)
    lip_i = np.zeros((k_users, m_groups))
    if p > 0:
        lip_s = np.max(np.abs(c * _floored_pow(psi, p - 2)), axis=1) * p * abs(p - 1)
        v_abs = np.abs(static[:, None, :] * w.T[None, :, :])     # (K, M, N)
        v_max = np.max(v_abs * _floored_pow(psi, 2 * (p - 1))[:, None, :], axis=2)
        lip_i = 2 * p * (abs(p - 1) + p) * v_max * v_abs.sum(axis=2)
        lip_i[own] = 0.0

    return SurrogateBundle(
        f_prev=f_prev.copy(),
        const=const,
        grad=grad,
        lip_signal=lip_s,
        lip_interference=lip_i,
        z=np.asarray(z, dtype=complex).copy(),
        noise_offset=zsq * config.noise_power,
        signal_value=2 * np.real(np.conj(z) * x[np.arange(k_users), group_of]),
        interference_value=np.abs(x) ** 2,
    )


def backtrack_curvature(bundle: SurrogateBundle, f_candidate: np.ndarray,
                        w: np.ndarray, geometry: ScenarioGeometry,
                        config: SystemConfig, static: np.ndarray):
    """Accept the candidate if the surrogate really lower-bounds the objective
    there; otherwise return a bundle with every curvature constant doubled."""
    p = config.directivity_factor
    psi_p = _clamped_pow(incidence_cosines(f_candidate, geometry), p)
    gamma = surrogate_gamma_tilde_all(bundle.z, w, static * psi_p,
                                      geometry.group_of, config.noise_power)
    if np.all(gamma >= bundle.lower_bound(f_candidate) - BACKTRACK_SLACK):
        return True, bundle
    return False, bundle.inflated()
