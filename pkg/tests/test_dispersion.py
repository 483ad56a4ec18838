"""Phase mismatch and emission spectra."""

import math

import numpy as np
import pytest

from spdclab import (
    MaterialModel,
    SPEED_OF_LIGHT,
    Spectrum,
    effective_spectrum,
    longitudinal_mismatch,
    matched_idler_angle,
    mismatch_function,
    transverse_profile,
)
from spdclab.errors import InputDomainError

TWO_PI_C = 2 * math.pi * SPEED_OF_LIGHT

# frozen reference-implementation widths (nm)
SINGLE_FWHM_3MM_NM = 78.56800014
COINC_FWHM_3MM_NM = 26.83568103
SINGLE_FWHM_05MM_NM = 194.8035179
COINC_FWHM_05MM_NM = 27.00386826


def _omega(lam_m: float) -> float:
    return TWO_PI_C / lam_m


def test_mismatch_vanishes_nowhere_but_small_at_degeneracy(source_3):
    dk0 = longitudinal_mismatch(source_3, _omega(810e-9))
    # the 1.8 degree cone leaves a small residual at line centre
    assert abs(dk0) < 5e4


def test_mismatch_brute_force_at_790nm(source_3):
    # independent recomputation straight from the index model
    m = MaterialModel()
    omega_s = _omega(790e-9)
    omega_p = _omega(405e-9)
    omega_i = omega_p - omega_s
    k_s = m.index(TWO_PI_C / omega_s, "o") * omega_s / SPEED_OF_LIGHT
    k_i = m.index(TWO_PI_C / omega_i, "o") * omega_i / SPEED_OF_LIGHT
    k_p = m.index(405e-9, "e") * omega_p / SPEED_OF_LIGHT
    expected = k_p - (k_s + k_i) * math.cos(math.radians(1.8))
    assert longitudinal_mismatch(source_3, omega_s) == pytest.approx(expected, rel=1e-10)


def test_mismatch_exchange_symmetry(source_3):
    # swapping signal and idler detuning cannot change the mismatch
    omega_0 = _omega(810e-9)
    for detuning in (1e13, 5e13, 1e14):
        plus = longitudinal_mismatch(source_3, omega_0 + detuning)
        minus = longitudinal_mismatch(source_3, omega_0 - detuning)
        assert plus == pytest.approx(minus, rel=1e-9)


def test_mismatch_function_is_unit_at_zero_length(source_3):
    omega = _omega(800e-9)
    assert mismatch_function(source_3, omega, length_m=0.0) == pytest.approx(1.0)


def test_mismatch_function_is_sinc(source_3):
    omega = _omega(795e-9)
    dk = longitudinal_mismatch(source_3, omega)
    x = dk * source_3.crystal_length_m / 2
    assert mismatch_function(source_3, omega) == pytest.approx(math.sin(x) / x, rel=1e-12)


def test_matched_idler_angle_at_degeneracy(source_3):
    # equal frequencies, equal o-indices: the idler mirrors the signal cone
    angle = matched_idler_angle(source_3, _omega(810e-9))
    assert math.degrees(angle) == pytest.approx(1.8, rel=1e-9)


def test_matched_idler_angle_moves_with_detuning(source_3):
    # redder signal -> bluer idler with larger wavenumber -> smaller angle
    angle = matched_idler_angle(source_3, _omega(850e-9))
    assert math.degrees(angle) < 1.8


def test_out_of_band_frequency_rejected(source_3):
    with pytest.raises(InputDomainError):
        longitudinal_mismatch(source_3, _omega(360e-9))


def test_transverse_profile_gaussian_in_mismatch(source_3):
    w = source_3.beam_waist_m
    assert transverse_profile(source_3, 0.0) == pytest.approx(1.0)
    assert transverse_profile(source_3, 2.0 / w) == pytest.approx(math.exp(-1.0), rel=1e-12)


def test_single_spectrum_width_three_millimetres(source_3):
    spectrum = effective_spectrum(source_3, "single")
    width_nm = spectrum.fwhm_wavelength_m() * 1e9
    assert width_nm == pytest.approx(SINGLE_FWHM_3MM_NM, rel=1e-6)
    assert 44.8 < width_nm < 83.2  # 64 nm +- 30%


def test_coincidence_spectrum_width_three_millimetres(source_3):
    spectrum = effective_spectrum(source_3, "coincidence")
    width_nm = spectrum.fwhm_wavelength_m() * 1e9
    assert width_nm == pytest.approx(COINC_FWHM_3MM_NM, rel=1e-6)
    assert 18.9 < width_nm < 35.1  # 27 nm +- 30%


def test_spectrum_widths_half_millimetre(source_05):
    single = effective_spectrum(source_05, "single").fwhm_wavelength_m() * 1e9
    coinc = effective_spectrum(source_05, "coincidence").fwhm_wavelength_m() * 1e9
    assert single == pytest.approx(SINGLE_FWHM_05MM_NM, rel=1e-6)
    assert coinc == pytest.approx(COINC_FWHM_05MM_NM, rel=1e-6)


def test_shorter_crystal_means_broader_single_spectrum(source_05, source_3):
    w_05 = effective_spectrum(source_05, "single").fwhm_omega()
    w_3 = effective_spectrum(source_3, "single").fwhm_omega()
    assert w_05 > w_3


def test_coincidence_filter_caps_the_width(source_05, source_3):
    # the collection Gaussian dominates for every length
    for src in (source_05, source_3):
        single = effective_spectrum(src, "single").fwhm_wavelength_m()
        coinc = effective_spectrum(src, "coincidence").fwhm_wavelength_m()
        assert coinc <= single + 1e-12


def test_spectrum_normalized_to_unit_peak(source_3):
    for mode in ("single", "coincidence"):
        spectrum = effective_spectrum(source_3, mode)
        assert np.max(spectrum.weights) == pytest.approx(1.0, abs=1e-12)
        assert spectrum.mode == mode
        assert np.all(spectrum.weights >= 0.0)


def test_spectrum_peak_at_line_centre(source_3):
    spectrum = effective_spectrum(source_3, "coincidence")
    peak_offset = spectrum.offsets[int(np.argmax(spectrum.weights))]
    assert abs(peak_offset) < 3 * spectrum.step


def test_effective_spectrum_rejects_unknown_mode(source_3):
    with pytest.raises(InputDomainError):
        effective_spectrum(source_3, "both")


def test_effective_spectrum_minimum_grid(source_3):
    with pytest.raises(InputDomainError):
        effective_spectrum(source_3, "single", n_points=64)


def test_spectrum_requires_uniform_grid():
    offsets = np.concatenate([np.linspace(-1e14, 0, 128), np.linspace(1e12, 1e14, 128)])
    weights = np.ones(256)
    with pytest.raises(InputDomainError):
        Spectrum(carrier_omega=_omega(810e-9), offsets=offsets, weights=weights, mode="single")


def test_spectrum_gaussian_fwhm_helper():
    # analytic check of the width extraction on an exact Gaussian
    sigma = 3e13
    offsets = np.linspace(-4 * sigma, 4 * sigma, 4001)
    weights = np.exp(-0.5 * (offsets / sigma) ** 2)
    spectrum = Spectrum(
        carrier_omega=_omega(810e-9), offsets=offsets, weights=weights, mode="single"
    )
    expected = 2 * math.sqrt(2 * math.log(2)) * sigma
    assert spectrum.fwhm_omega() == pytest.approx(expected, rel=1e-4)
