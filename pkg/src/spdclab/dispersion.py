"""Phase matching and effective emission spectra.

For a signal photon detected at the fixed internal angle Theta, transverse
momentum conservation selects the idler angle, and the remaining
longitudinal mismatch

    dk = k_p - k_s cos(Theta) - k_i cos(theta_i),
    k_s sin(Theta) = k_i sin(theta_i),

filtered by a finite crystal gives the emission amplitude
f = sinc(dk L / 2).  Single-detector spectra follow |f|^2; coincidence
spectra carry an extra collection factor R whose squared profile is a
Gaussian matched to the measured coincidence bandwidth.  Spectra are sampled
on a uniform frequency grid wide enough to resolve the sinc side lobes and
are peak-normalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InputDomainError, NumericalFailure
from .materials import SPEED_OF_LIGHT
from .source import SourceConfig

__all__ = [
    "Spectrum",
    "longitudinal_mismatch",
    "mismatch_function",
    "transverse_profile",
    "effective_spectrum",
]

_MIN_GRID_POINTS = 256


def _index_o_array(cfg: SourceConfig, lam_m):
    """Vectorized ordinary Sellmeier index with domain checking."""
    lam_um = np.asarray(lam_m, dtype=float) * 1e6
    lo, hi = cfg.material.validity_um
    if np.any(lam_um < lo) or np.any(lam_um > hi):
        raise InputDomainError(
            f"wavelength outside dispersion validity range [{lo}, {hi}] um"
        )
    a, b, c_, d = cfg.material.sellmeier_o
    return np.sqrt(a + b / (lam_um * lam_um - c_) - d * lam_um * lam_um)


def _pair_wavenumbers(cfg: SourceConfig, omega_s):
    """Ordinary signal/idler wavenumbers at conjugate frequencies."""
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = cfg.pump_omega - omega_s
    if np.any(omega_s <= 0.0) or np.any(omega_i <= 0.0):
        raise InputDomainError("signal frequency outside the pair band")
    lam_s = 2.0 * math.pi * SPEED_OF_LIGHT / omega_s
    lam_i = 2.0 * math.pi * SPEED_OF_LIGHT / omega_i
    k_s = _index_o_array(cfg, lam_s) * omega_s / SPEED_OF_LIGHT
    k_i = _index_o_array(cfg, lam_i) * omega_i / SPEED_OF_LIGHT
    return omega_s, k_s, k_i


def matched_idler_angle(cfg: SourceConfig, omega_s):
    """Internal idler angle (rad) that zeroes the transverse mismatch.

    Raises when no real solution exists, i.e. the detuning has left the
    phase-matchable band of the fixed-cone geometry.
    """
    omega_s, k_s, k_i = _pair_wavenumbers(cfg, omega_s)
    sin_i = k_s * math.sin(math.radians(cfg.cone_internal_deg)) / k_i
    if np.any(sin_i > 1.0):
        raise InputDomainError("no transversely matched idler angle at this detuning")
    angle = np.arcsin(sin_i)
    if omega_s.ndim == 0:
        return float(angle)
    return angle


def longitudinal_mismatch(cfg: SourceConfig, omega_s):
    """Longitudinal wave-vector mismatch (rad/m) versus signal frequency.

    The pump stays at its line centre and both emission cosines sit at the
    reference cone angle, so conjugate detunings mismatch identically
    (signal/idler exchange symmetry).  Raises if the detuning cannot be
    transversely matched or leaves the dispersion validity window.
    """
    matched_idler_angle(cfg, omega_s)
    omega_s, k_s, k_i = _pair_wavenumbers(cfg, omega_s)
    k_p = cfg.material.wavenumber(cfg.pump_wavelength_m, "e")
    dk = k_p - (k_s + k_i) * math.cos(math.radians(cfg.cone_internal_deg))
    if omega_s.ndim == 0:
        return float(dk)
    return dk


def mismatch_function(cfg: SourceConfig, omega_s, length_m: float | None = None):
    """Finite-crystal emission amplitude f = sinc(dk L / 2); f = 1 at L = 0."""
    length = cfg.crystal_length_m if length_m is None else length_m
    if length == 0.0:
        shaped = np.ones_like(np.asarray(omega_s, dtype=float))
        return float(shaped) if shaped.ndim == 0 else shaped
    x = longitudinal_mismatch(cfg, omega_s) * (0.5 * length)
    return np.sinc(np.asarray(x) / np.pi) if np.ndim(x) else float(np.sinc(x / np.pi))


def transverse_profile(cfg: SourceConfig, dk_perp):
    """Gaussian suppression exp(-w^2 dk_perp^2 / 4) from the pump waist."""
    w = cfg.beam_waist_m
    return np.exp(-0.25 * w * w * np.asarray(dk_perp, dtype=float) ** 2)


@dataclass(frozen=True)
class Spectrum:
    """Sampled emission power spectrum around the pair line centre.

    ``offsets`` is a strictly increasing uniform grid of angular-frequency
    offsets from ``carrier_omega``; ``weights`` is nonnegative with peak 1.
    """

    carrier_omega: float
    offsets: np.ndarray
    weights: np.ndarray
    mode: str

    def __post_init__(self):
        offsets = np.asarray(self.offsets, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if offsets.size < _MIN_GRID_POINTS:
            raise InputDomainError(f"spectrum grid needs >= {_MIN_GRID_POINTS} points")
        steps = np.diff(offsets)
        if np.any(steps <= 0.0) or (np.max(steps) - np.min(steps)) > 1e-6 * np.max(steps):
            raise InputDomainError("spectrum grid must be uniform and increasing")
        if np.any(weights < 0.0):
            raise InputDomainError("spectrum weights must be nonnegative")
        if abs(float(np.max(weights)) - 1.0) > 1e-12:
            raise InputDomainError("spectrum weights must be peak-normalized")
        offsets.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "weights", weights)

    @property
    def step(self) -> float:
        return float(self.offsets[1] - self.offsets[0])

    def total(self) -> float:
        """Trapezoidal integral of the weights over the grid."""
        return float(np.trapezoid(self.weights, self.offsets))

    def fwhm_omega(self) -> float:
        """Full width at half maximum (rad/s) by linear interpolation."""
        w = self.weights
        peak_idx = int(np.argmax(w))
        half = 0.5 * w[peak_idx]

        def crossing(side: str) -> float:
            if side == "left":
                idx = np.nonzero(w[: peak_idx + 1] < half)[0]
                if idx.size == 0:
                    raise NumericalFailure("half-maximum not reached inside the grid")
                i = idx[-1]
                x0, x1 = self.offsets[i], self.offsets[i + 1]
                y0, y1 = w[i], w[i + 1]
            else:
                idx = np.nonzero(w[peak_idx:] < half)[0]
                if idx.size == 0:
                    raise NumericalFailure("half-maximum not reached inside the grid")
                i = peak_idx + idx[0]
                x0, x1 = self.offsets[i - 1], self.offsets[i]
                y0, y1 = w[i - 1], w[i]
            return x0 + (half - y0) * (x1 - x0) / (y1 - y0)

        return crossing("right") - crossing("left")

    def fwhm_wavelength_m(self) -> float:
        """FWHM converted to a wavelength width at the carrier."""
        two_pi_c = 2.0 * math.pi * SPEED_OF_LIGHT
        w = self.weights
        peak = int(np.argmax(w))
        half = 0.5 * w[peak]
        # locate the same crossings as fwhm_omega, then map each to lambda
        left = np.nonzero(w[: peak + 1] < half)[0]
        right = np.nonzero(w[peak:] < half)[0]
        if left.size == 0 or right.size == 0:
            raise NumericalFailure("half-maximum not reached inside the grid")
        i = left[-1]
        frac = (half - w[i]) / (w[i + 1] - w[i])
        omega_lo = self.carrier_omega + self.offsets[i] + frac * self.step
        j = peak + right[0]
        frac = (half - w[j - 1]) / (w[j] - w[j - 1])
        omega_hi = self.carrier_omega + self.offsets[j - 1] + frac * self.step
        return two_pi_c / omega_lo - two_pi_c / omega_hi


def _domain_half_span(cfg: SourceConfig) -> float:
    """Largest |offset| keeping both photons inside the validity window."""
    omega_0 = cfg.downconv_omega
    lo_um, hi_um = cfg.material.validity_um
    omega_min = 2.0 * math.pi * SPEED_OF_LIGHT / (hi_um * 1e-6)
    omega_max = 2.0 * math.pi * SPEED_OF_LIGHT / (lo_um * 1e-6)
    # omega_s = omega_0 + d, omega_i = omega_0 - d; both must stay inside
    span = min(omega_0 - omega_min, omega_max - omega_0)
    return 0.999 * span


def _first_zero(cfg: SourceConfig, length: float, side: float, limit: float) -> float:
    """Offset of the first sinc zero (|dk| L/2 = pi) on one side, or
    ``limit`` when the zero lies beyond the usable band."""

    def excess(delta: float) -> float:
        dk = longitudinal_mismatch(cfg, cfg.downconv_omega + side * delta)
        return abs(dk) * 0.5 * length - math.pi

    step = limit / 1024.0
    prev = step
    while prev < limit and excess(prev) >= 0.0:
        # already past a zero at the very first probe; shrink
        step /= 4.0
        prev = step
        if step < limit / 1e9:
            break
    delta = prev
    while delta < limit:
        grown = min(delta * 2.0, limit)
        if excess(grown) > 0.0:
            return float(brentq(excess, delta, grown, xtol=1e-6 * grown))
        if grown >= limit:
            break
        delta = grown
    return limit


def effective_spectrum(
    cfg: SourceConfig, mode: str = "single", n_points: int = 2048
) -> Spectrum:
    """Sampled |f|^2 (single) or |f R|^2 (coincidence) spectrum.

    The grid spans six first-zero widths of the sinc on each side,
    clipped to the dispersion validity window; 2048 points resolve the
    side lobes at the longest crystal of interest.  The coincidence
    collection factor R is a unit-peak Gaussian whose squared profile has
    FWHM equal to the configured coincidence bandwidth.
    """
    if mode not in ("single", "coincidence"):
        raise InputDomainError(f"unknown spectrum mode {mode!r}")
    if n_points < _MIN_GRID_POINTS:
        raise InputDomainError(f"spectrum grid needs >= {_MIN_GRID_POINTS} points")
    omega_0 = cfg.downconv_omega
    limit = _domain_half_span(cfg)
    length = cfg.crystal_length_m
    if length > 0.0:
        span_pos = min(6.0 * _first_zero(cfg, length, +1.0, limit), limit)
        span_neg = min(6.0 * _first_zero(cfg, length, -1.0, limit), limit)
    else:
        fallback = min(8.0 * cfg.coincidence_fwhm_omega, limit)
        span_pos = span_neg = fallback
    offsets = np.linspace(-span_neg, span_pos, n_points)
    amp = mismatch_function(cfg, omega_0 + offsets, length)
    weights = np.asarray(amp, dtype=float) ** 2
    if mode == "coincidence":
        width = cfg.coincidence_fwhm_omega
        weights = weights * np.exp(-4.0 * math.log(2.0) * (offsets / width) ** 2)
    peak = float(np.max(weights))
    if peak <= 0.0:
        raise NumericalFailure("spectrum vanished on the whole grid")
    return Spectrum(
        carrier_omega=omega_0,
        offsets=offsets,
        weights=weights / peak,
        mode=mode,
    )
