"""Scalar system parameters shared by every stage of the optimizer.

All powers are linear watts internally; dBm only exists at the CLI boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class SystemConfig:
    """Immutable bag of scalars describing array, users, and solver knobs.

    ``element_spacing`` and ``element_area`` default to half a wavelength and
    lambda^2/(4 pi) when left as None. ``peak_gain_override`` replaces the
    power-conserving peak gain 2(2p+1); the isotropic benchmark uses p=0 with
    an override of 1.
    """

    carrier_frequency: float          # Hz
    noise_power: float                # W, identical for every user
    transmit_power_budget: float      # W
    directivity_factor: float         # cosine-power exponent p >= 0
    max_zenith: float                 # rad, in (0, pi/2]
    num_antennas: int
    num_groups: int
    group_sizes: tuple[int, ...]
    element_spacing: float | None = None   # m
    element_area: float | None = None      # m^2
    convergence_threshold: float = 1e-3    # fractional min-SINR increase
    max_iterations: int = 30
    peak_gain_override: float | None = None
    # Pointing block: surrogate steps (with closed-form auxiliary refresh each
    # step) repeat until the per-step fractional gain drops below the inner
    # threshold or the step cap is hit.
    sca_inner_iterations: int = 600
    sca_inner_threshold: float = 5e-6

    def __post_init__(self):
        if self.carrier_frequency <= 0:
            raise ValueError("carrier_frequency must be positive")
        if self.noise_power <= 0:
            raise ValueError("noise_power must be positive")
        if self.transmit_power_budget <= 0:
            raise ValueError("transmit_power_budget must be positive")
        if self.directivity_factor < 0:
            raise ValueError("directivity_factor must be >= 0")
        if not 0 < self.max_zenith <= np.pi / 2:
            raise ValueError("max_zenith must lie in (0, pi/2]")
        if self.num_antennas < 1 or self.num_groups < 1:
            raise ValueError("need at least one antenna and one group")
        if len(self.group_sizes) != self.num_groups:
            raise ValueError("group_sizes length must equal num_groups")
        if any(g < 1 for g in self.group_sizes):
            raise ValueError("every group needs at least one user")
        if self.convergence_threshold <= 0 or self.max_iterations < 1:
            raise ValueError("bad convergence settings")
        if self.sca_inner_iterations < 1 or self.sca_inner_threshold <= 0:
            raise ValueError("bad pointing-block settings")
        object.__setattr__(self, "group_sizes", tuple(int(g) for g in self.group_sizes))

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def num_users(self) -> int:
        return int(sum(self.group_sizes))

    @property
    def spacing(self) -> float:
        return self.element_spacing if self.element_spacing is not None else self.wavelength / 2

    @property
    def area(self) -> float:
        if self.element_area is not None:
            return self.element_area
        return self.wavelength**2 / (4 * np.pi)

    @property
    def peak_gain(self) -> float:
        """Boresight gain of one element; 2(2p+1) unless overridden."""
        if self.peak_gain_override is not None:
            return self.peak_gain_override
        return 2.0 * (2.0 * self.directivity_factor + 1.0)
