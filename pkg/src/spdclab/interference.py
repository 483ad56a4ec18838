"""Michelson-style fringe patterns and coherence-width extraction.

The detection probability for a delay tau is the spectrum-weighted
two-path interference P(tau) = integral S(d) * |1 + exp(i (W0+d) tau)|^2 / 4,
which oscillates at the carrier W0 under an envelope set by the Fourier
transform of the spectral weight.  The envelope width is extracted from
per-period fringe visibilities, so it works for any spectral shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import Spectrum
from .errors import InputDomainError, NumericalFailure

_CHUNK = 512
_MIN_SAMPLES_PER_PERIOD = 6.0


def default_tau_grid(span_s: float = 300e-15, n_points: int = 8192) -> np.ndarray:
    """Symmetric delay grid; 8192 points over +-300 fs by default."""
    if span_s <= 0.0 or n_points < 16:
        raise InputDomainError("need a positive span and at least 16 delay points")
    return np.linspace(-span_s, span_s, n_points)


@dataclass(frozen=True)
class FringePattern:
    """Sampled interference curve with its zero-delay reference."""

    taus_s: np.ndarray
    probabilities: np.ndarray
    reference: float  # P at tau = 0, the global maximum
    carrier_omega: float
    mode: str

    def __post_init__(self):
        taus = np.asarray(self.taus_s, dtype=float)
        probs = np.asarray(self.probabilities, dtype=float)
        if taus.size != probs.size or taus.size < 16:
            raise InputDomainError("fringe pattern needs matching tau/P arrays")
        if np.any(probs < 0.0):
            raise InputDomainError("fringe probabilities must be nonnegative")
        if np.max(probs) > self.reference * (1.0 + 1e-9):
            raise InputDomainError("fringe probabilities exceed the zero-delay reference")
        taus.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "taus_s", taus)
        object.__setattr__(self, "probabilities", probs)

    def normalized(self) -> np.ndarray:
        return self.probabilities / self.reference


def fringe_pattern(spectrum: Spectrum, taus_s) -> FringePattern:
    """Two-path interference of a spectral weight over a delay grid."""
    taus = np.asarray(taus_s, dtype=float)
    offsets = spectrum.offsets
    weights = spectrum.weights
    norm = spectrum.total()
    if norm <= 0.0:
        raise InputDomainError("spectrum carries no weight")
    probs = np.empty_like(taus)
    for lo in range(0, taus.size, _CHUNK):
        chunk = taus[lo : lo + _CHUNK]
        phase = np.exp(1j * np.outer(chunk, offsets))
        kernel = np.trapezoid(weights * phase, offsets, axis=1)
        carrier = np.exp(1j * spectrum.carrier_omega * chunk)
        probs[lo : lo + chunk.size] = 0.5 * (norm + np.real(carrier * kernel))
    np.clip(probs, 0.0, None, out=probs)
    return FringePattern(
        taus_s=taus,
        probabilities=probs,
        reference=float(norm),
        carrier_omega=spectrum.carrier_omega,
        mode=spectrum.mode,
    )


def _fringe_visibility(pattern: FringePattern):
    """Per-carrier-period visibility samples (tau_center, V)."""
    taus = pattern.taus_s
    steps = np.diff(taus)
    if np.any(steps <= 0.0) or (np.max(steps) - np.min(steps)) > 1e-9 * np.max(steps):
        raise InputDomainError("fringe grid must be uniform and increasing")
    period = 2.0 * math.pi / pattern.carrier_omega
    if steps[0] > period / _MIN_SAMPLES_PER_PERIOD:
        raise InputDomainError(
            "undersampled fringe grid: need at least "
            f"{_MIN_SAMPLES_PER_PERIOD:g} samples per carrier period"
        )
    per_window = max(int(round(period / steps[0])), 2)
    probs = pattern.probabilities
    centers, vis = [], []
    for lo in range(0, taus.size - per_window + 1, per_window):
        window = probs[lo : lo + per_window]
        hi, lo_v = float(window.max()), float(window.min())
        if hi + lo_v <= 0.0:
            continue
        centers.append(float(taus[lo : lo + per_window].mean()))
        vis.append((hi - lo_v) / (hi + lo_v))
    if len(vis) < 8:
        raise InputDomainError("fringe grid too short to sample the envelope")
    return np.asarray(centers), np.asarray(vis)


def envelope_width(pattern: FringePattern) -> float:
    """FWHM (s) of the per-period fringe-visibility envelope."""
    centers, vis = _fringe_visibility(pattern)
    peak_idx = int(np.argmax(vis))
    half = 0.5 * vis[peak_idx]

    def first_crossing(direction: int) -> float:
        i = peak_idx
        while 0 <= i + direction < vis.size:
            j = i + direction
            if vis[j] < half:
                frac = (half - vis[i]) / (vis[j] - vis[i])
                return float(centers[i] + frac * (centers[j] - centers[i]))
            i = j
        raise NumericalFailure("fringe pattern does not span the envelope decay")

    return first_crossing(+1) - first_crossing(-1)
