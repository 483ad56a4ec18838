"""Two-crystal down-conversion source: delays and decoherence parameter.

The source emits HH pairs from the second crystal and VV pairs from the
first.  A short-coherence pump stamps each pair with the optical delay
accumulated between pair creation and the crystal exit, so the HH and VV
amplitudes decohere by

    p = exp(-|tau_H - tau_V| / tau_c),

with tau_c the pump coherence time.  Crystal-centre delays use the group
velocities of the four relevant rays (pump o/e, down-converted o/e at the
internal emission angles); a position-averaged variant integrates the same
exponential over the two creation depths, and a birefringent pre-compensation
crystal shifts the pump delay before the difference is taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputDomainError
from .materials import DEFAULT_REFERENCE_TABLE, SPEED_OF_LIGHT, MaterialModel

__all__ = [
    "SourceConfig",
    "DelayReport",
    "propagation_delays",
    "precompensation_delay",
    "compensated_delay",
    "decoherence_parameter",
    "position_averaged_p",
    "build_delay_report",
]

_TABLE = DEFAULT_REFERENCE_TABLE


@dataclass(frozen=True)
class SourceConfig:
    """Geometry, pump and material parameters of the two-crystal source.

    Group velocities default to the tabulated group indices carried by the
    material model; ``from_material`` recomputes them from the Sellmeier
    derivative instead (the two agree within the table tolerance).

    All angles are degrees; all lengths metres; times seconds.
    """

    crystal_length_m: float = 0.5e-3
    coherence_time_s: float = 544e-15
    pump_wavelength_m: float = 405e-9
    phi1_deg: float = 1.807
    phi2_deg: float = 1.84
    phi3_deg: float = 1.806
    cone_external_deg: float = 3.0
    cone_internal_deg: float = 1.8
    beam_waist_m: float = 2e-3
    vg_pump_o: float = SPEED_OF_LIGHT / _TABLE.pump_o.group_index
    vg_pump_e: float = SPEED_OF_LIGHT / _TABLE.pump_e.group_index
    vg_down_o: float = SPEED_OF_LIGHT / _TABLE.downconv_o.group_index
    vg_down_e: float = SPEED_OF_LIGHT / _TABLE.downconv_e.group_index
    coincidence_fwhm_nm: float = 27.0
    compensation_length_m: float = 0.0
    compensation_orientation_deg: float = 0.0
    material: MaterialModel = field(default_factory=MaterialModel)

    def __post_init__(self):
        if self.crystal_length_m < 0 or self.compensation_length_m < 0:
            raise InputDomainError("crystal lengths must be non-negative")
        if self.coherence_time_s <= 0:
            raise InputDomainError("pump coherence time must be positive")
        if self.beam_waist_m <= 0:
            raise InputDomainError("beam waist must be positive")
        if self.coincidence_fwhm_nm <= 0:
            raise InputDomainError("coincidence spectral width must be positive")
        for name in ("phi1_deg", "phi2_deg", "phi3_deg", "cone_internal_deg"):
            value = getattr(self, name)
            if not (0.0 < value < 5.0):
                raise InputDomainError(f"{name}={value} outside (0, 5) degrees")
        if not (0.0 < self.cone_external_deg < 10.0):
            raise InputDomainError("external cone angle outside (0, 10) degrees")
        for name in ("vg_pump_o", "vg_pump_e", "vg_down_o", "vg_down_e"):
            v = getattr(self, name)
            if not (SPEED_OF_LIGHT / 3.0 < v < SPEED_OF_LIGHT):
                raise InputDomainError(f"{name}={v:.4g} m/s is not a physical group velocity")
        if self.compensation_orientation_deg not in (0.0, 90.0):
            raise InputDomainError("compensation orientation must be 0 or 90 degrees")

    @classmethod
    def from_material(cls, material: MaterialModel, **overrides) -> "SourceConfig":
        """Build with group velocities from the Sellmeier derivative."""
        lam_p = overrides.pop("pump_wavelength_m", material.pump_wavelength_m)
        lam_0 = material.downconv_wavelength_m
        return cls(
            pump_wavelength_m=lam_p,
            vg_pump_o=material.group_velocity(lam_p, "o"),
            vg_pump_e=material.group_velocity(lam_p, "e"),
            vg_down_o=material.group_velocity(lam_0, "o"),
            vg_down_e=material.group_velocity(lam_0, "e"),
            material=material,
            **overrides,
        )

    # -- derived spectral quantities ----------------------------------------

    @property
    def pump_omega(self) -> float:
        """Pump angular frequency (rad/s)."""
        return 2.0 * math.pi * SPEED_OF_LIGHT / self.pump_wavelength_m

    @property
    def downconv_wavelength_m(self) -> float:
        return 2.0 * self.pump_wavelength_m

    @property
    def downconv_omega(self) -> float:
        return 0.5 * self.pump_omega

    @property
    def coincidence_fwhm_omega(self) -> float:
        """Coincidence spectral width converted to rad/s at the pair line."""
        lam = self.downconv_wavelength_m
        return (
            2.0
            * math.pi
            * SPEED_OF_LIGHT
            * (self.coincidence_fwhm_nm * 1e-9)
            / (lam * lam)
        )


@dataclass(frozen=True)
class DelayReport:
    """Delay budget and decoherence parameter for one crystal length."""

    length_m: float
    compensation_length_m: float
    compensation_orientation_deg: float
    tau_h_s: float
    tau_v_s: float
    delta_s: float
    delta_effective_s: float
    p_midpoint: float
    p_position_averaged: float


def propagation_delays(cfg: SourceConfig, length_m: float | None = None):
    """Crystal-centre group delays (tau_H, tau_V) in seconds.

    The HH pair is born at the centre of the second crystal: the pump first
    crosses half of crystal one as an o-ray and half of crystal two as an
    e-ray, then the pair leaves through the remaining half as o-rays at the
    internal angle phi3.  The VV pair is born at the centre of crystal one
    and leaves through half of it as o-rays (phi1) and through all of
    crystal two as e-rays (phi2).
    """
    length = cfg.crystal_length_m if length_m is None else length_m
    if length < 0:
        raise InputDomainError("crystal length must be non-negative")
    half = 0.5 * length
    tau_h = half * (
        1.0 / cfg.vg_pump_o
        + 1.0 / cfg.vg_pump_e
        + 1.0 / (cfg.vg_down_o * math.cos(math.radians(cfg.phi3_deg)))
    )
    tau_v = half * (
        1.0 / (cfg.vg_down_o * math.cos(math.radians(cfg.phi1_deg)))
        + 2.0 / (cfg.vg_down_e * math.cos(math.radians(cfg.phi2_deg)))
    )
    return tau_h, tau_v


def precompensation_delay(cfg: SourceConfig) -> float:
    """o/e group delay of the pump across the pre-compensation crystal."""
    return cfg.compensation_length_m * abs(1.0 / cfg.vg_pump_o - 1.0 / cfg.vg_pump_e)


def _apply_compensation(cfg: SourceConfig, delta_s):
    """Effective |delay difference| after the pre-compensation shift.

    Orientation 0 deg subtracts the pre-delay (it counteracts the crystal
    pair), 90 deg adds it.  Works on scalars and arrays.
    """
    pre = precompensation_delay(cfg)
    if pre == 0.0:
        return np.abs(delta_s)
    if cfg.compensation_orientation_deg == 0.0:
        return np.abs(np.abs(delta_s) - pre)
    return np.abs(delta_s) + pre


def compensated_delay(cfg: SourceConfig, length_m: float | None = None) -> float:
    """Effective delay difference entering the decoherence exponent."""
    tau_h, tau_v = propagation_delays(cfg, length_m)
    return float(_apply_compensation(cfg, tau_h - tau_v))


def decoherence_parameter(cfg: SourceConfig, length_m: float | None = None) -> float:
    """p = exp(-delta_tau_eff / tau_c), the HH/VV coherence survival factor."""
    return math.exp(-compensated_delay(cfg, length_m) / cfg.coherence_time_s)


def position_averaged_p(
    cfg: SourceConfig, length_m: float | None = None, n_grid: int = 128
) -> float:
    """Decoherence parameter averaged over the pair-creation depths.

    The creation depth z1 (VV, crystal one) and z2 (HH, crystal two) each
    spread uniformly over [0, L].  The delay difference is affine in
    (z1, z2), so averaging exp(-|.|/tau_c) on a midpoint lattice converges
    fast and, by convexity, never falls below the crystal-centre value.
    """
    if n_grid < 2:
        raise InputDomainError("position average needs at least a 2x2 grid")
    length = cfg.crystal_length_m if length_m is None else length_m
    if length == 0.0:
        return 1.0
    z = (np.arange(n_grid) + 0.5) * (length / n_grid)
    z1 = z[:, None]
    z2 = z[None, :]
    cos1 = math.cos(math.radians(cfg.phi1_deg))
    cos2 = math.cos(math.radians(cfg.phi2_deg))
    cos3 = math.cos(math.radians(cfg.phi3_deg))
    tau_h = (
        (length - z1) / cfg.vg_pump_o
        + z2 / cfg.vg_pump_e
        + (length - z2) / (cfg.vg_down_o * cos3)
    )
    tau_v = (length - z1) / (cfg.vg_down_o * cos1) + length / (cfg.vg_down_e * cos2)
    delta = _apply_compensation(cfg, tau_h - tau_v)
    return float(np.mean(np.exp(-delta / cfg.coherence_time_s)))


def build_delay_report(
    cfg: SourceConfig, lengths_m, n_grid: int = 128
) -> list[DelayReport]:
    """One report row per crystal length, honouring any configured
    pre-compensation."""
    rows = []
    for length in lengths_m:
        tau_h, tau_v = propagation_delays(cfg, length)
        rows.append(
            DelayReport(
                length_m=length,
                compensation_length_m=cfg.compensation_length_m,
                compensation_orientation_deg=cfg.compensation_orientation_deg,
                tau_h_s=tau_h,
                tau_v_s=tau_v,
                delta_s=abs(tau_h - tau_v),
                delta_effective_s=compensated_delay(cfg, length),
                p_midpoint=decoherence_parameter(cfg, length),
                p_position_averaged=position_averaged_p(cfg, length, n_grid),
            )
        )
    return rows
