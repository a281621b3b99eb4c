"""Array and user geometry: element grid, boresight parameterization, arc layout.

Conventions: the array sits on the y-z plane with its centroid at the origin,
zenith is measured from +x, azimuth in the y-z plane from +y. Users live in
the x > 0 half-space for the layouts built here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SystemConfig

E_X = np.array([1.0, 0.0, 0.0])


def boresight_vector(zenith, azimuth) -> np.ndarray:
    """Unit pointing vector [cos tz, sin tz cos ta, sin tz sin ta].

    zenith = 0 maps to +x regardless of azimuth. Accepts scalars or arrays
    (broadcast, components on the leading axis).
    """
    tz = np.asarray(zenith, dtype=float)
    ta = np.asarray(azimuth, dtype=float)
    return np.stack(
        [np.cos(tz) * np.ones_like(ta), np.sin(tz) * np.cos(ta), np.sin(tz) * np.sin(ta)]
    )


def aligned_pointing(n_antennas: int) -> np.ndarray:
    """3 x N matrix with every column on the +x axis (the fixed orientation)."""
    f = np.zeros((3, n_antennas))
    f[0, :] = 1.0
    return f


def random_pointing(n_antennas: int, max_zenith: float, rng: np.random.Generator) -> np.ndarray:
    """3 x N matrix of boresights with zenith ~ U[0, max_zenith], azimuth ~ U[0, 2pi)."""
    tz = rng.uniform(0.0, max_zenith, size=n_antennas)
    ta = rng.uniform(0.0, 2 * np.pi, size=n_antennas)
    return boresight_vector(tz, ta)


def upa_positions(n_antennas: int, spacing: float) -> np.ndarray:
    """(N, 3) element positions on x=0 in a near-square grid centered at the origin.

    rows = floor(sqrt(N)) along z, columns = ceil(N/rows) along y; a partially
    filled last row is re-centered so the centroid is the origin.
    """
    if n_antennas < 1:
        raise ValueError("need at least one antenna")
    rows = int(np.floor(np.sqrt(n_antennas)))
    cols = int(np.ceil(n_antennas / rows))
    idx = np.arange(n_antennas)
    r, c = divmod(idx, cols)
    pos = np.zeros((n_antennas, 3))
    pos[:, 1] = (c - (cols - 1) / 2) * spacing
    pos[:, 2] = (r - (rows - 1) / 2) * spacing
    pos -= pos.mean(axis=0)
    pos -= pos.mean(axis=0)  # second pass kills the last float ulp for partial grids
    return pos


@dataclass(frozen=True)
class ScenarioGeometry:
    """Antenna/user positions, the group partition, and per-link geometry."""

    antenna_positions: np.ndarray   # (N, 3)
    user_positions: np.ndarray      # (K, 3)
    group_of: np.ndarray            # (K,) int, group index per user
    link_distance: np.ndarray = field(init=False)    # (K, N)
    link_direction: np.ndarray = field(init=False)   # (K, N, 3) unit vectors

    def __post_init__(self):
        p = np.asarray(self.antenna_positions, dtype=float)
        q = np.asarray(self.user_positions, dtype=float)
        g = np.asarray(self.group_of, dtype=int)
        if p.ndim != 2 or p.shape[1] != 3 or q.ndim != 2 or q.shape[1] != 3:
            raise ValueError("positions must be (N,3) and (K,3)")
        if g.shape != (q.shape[0],):
            raise ValueError("group_of must assign one group per user")
        diff = q[:, None, :] - p[None, :, :]          # (K, N, 3)
        dist = np.linalg.norm(diff, axis=2)
        if np.any(dist <= 0):
            raise ValueError("a user coincides with an antenna")
        object.__setattr__(self, "antenna_positions", p)
        object.__setattr__(self, "user_positions", q)
        object.__setattr__(self, "group_of", g)
        object.__setattr__(self, "link_distance", dist)
        object.__setattr__(self, "link_direction", diff / dist[:, :, None])

    @property
    def num_users(self) -> int:
        return self.user_positions.shape[0]

    @property
    def num_antennas(self) -> int:
        return self.antenna_positions.shape[0]

    @property
    def num_groups(self) -> int:
        return int(self.group_of.max()) + 1

    def group_members(self, m: int) -> np.ndarray:
        return np.nonzero(self.group_of == m)[0]


def arc_user_layout(config: SystemConfig, radius: float, height: float, spread: float) -> ScenarioGeometry:
    """Users equally spaced on a circular arc of the given radius at z = -height.

    The arc is centered on the +x axis and spans ``spread`` radians; groups are
    contiguous blocks of consecutive arc users, sized per config.group_sizes.
    """
    if radius <= 0 or height <= 0:
        raise ValueError("radius and height must be positive")
    if not 0 < spread <= np.pi:
        raise ValueError("user spread angle must lie in (0, pi]")
    k = config.num_users
    if k == 1:
        alpha = np.zeros(1)
    else:
        alpha = np.linspace(-spread / 2, spread / 2, k)
    users = np.column_stack(
        [radius * np.cos(alpha), radius * np.sin(alpha), -height * np.ones(k)]
    )
    group_of = np.repeat(np.arange(config.num_groups), config.group_sizes)
    antennas = upa_positions(config.num_antennas, config.spacing)
    return ScenarioGeometry(antennas, users, group_of)


def check_pointing(f: np.ndarray, max_zenith: float, unit: bool = False,
                   tol: float = 1e-9) -> None:
    """Raise if any column violates the rotation cone or the (relaxed) norm bound."""
    norms = np.linalg.norm(f, axis=0)
    if unit:
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise AssertionError(f"pointing columns not unit norm: {norms}")
    elif np.any(norms > 1.0 + tol):
        raise AssertionError(f"pointing columns escape the unit ball: {norms}")
    if np.any(f[0, :] < np.cos(max_zenith) - tol):
        raise AssertionError("pointing columns escape the zenith cone")
