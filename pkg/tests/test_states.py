"""Polarization state model: density matrices, probabilities, visibility."""

import math

import numpy as np
import pytest

from spdclab import (
    DensityMatrix4,
    PolarizationKet,
    coincidence_probability,
    entangled_component,
    mixed_component,
    model_state,
    purity,
    visibility,
)
from spdclab.errors import InputDomainError


def test_model_state_structure():
    rho = model_state(0.72, 0.3).matrix
    assert rho[0, 0] == pytest.approx(0.5)
    assert rho[3, 3] == pytest.approx(0.5)
    assert rho[1, 1] == rho[2, 2] == 0.0
    # coherence sits only on the HH/VV corner with magnitude p/2
    assert abs(rho[0, 3]) == pytest.approx(0.36, rel=1e-12)
    assert rho[0, 3] == pytest.approx(0.36 * np.exp(-0.3j), rel=1e-12)
    assert rho[3, 0] == np.conj(rho[0, 3])


def test_model_state_limits():
    assert np.allclose(model_state(0.0).matrix, mixed_component().matrix)
    assert np.allclose(model_state(1.0).matrix, entangled_component().matrix)


def test_model_state_p_range():
    with pytest.raises(InputDomainError):
        model_state(-0.1)
    with pytest.raises(InputDomainError):
        model_state(1.1)


def test_entangled_component_is_pure_bell_state():
    rho = entangled_component().matrix
    ket = np.zeros(4, dtype=complex)
    ket[0] = ket[3] = 1 / math.sqrt(2)
    assert np.allclose(rho, np.outer(ket, ket.conj()))


def test_purity_formula():
    # Tr(rho^2) = (1 + p^2) / 2 for this family
    for p in (0.0, 0.5, 0.77, 1.0):
        assert purity(model_state(p)) == pytest.approx((1 + p * p) / 2, rel=1e-12)


def test_visibility_equals_p_exactly():
    for p in np.linspace(0.0, 1.0, 101):
        assert abs(visibility(model_state(float(p))) - p) < 1e-12


def test_coincidence_probability_closed_form():
    # P(xi_s, 45) = p cos^2(xi_s - 45)/2 + (1 - p)/4
    p = 0.77
    rho = model_state(p)
    for xi in (0.0, 17.0, 45.0, 90.0, 135.0):
        expected = 0.5 * p * math.cos(math.radians(xi - 45.0)) ** 2 + 0.25 * (1 - p)
        assert coincidence_probability(rho, xi, 45.0) == pytest.approx(expected, rel=1e-12)


def test_coincidence_probability_bell_state_parallel_polarizers():
    rho = entangled_component()
    assert coincidence_probability(rho, 30.0, 30.0) == pytest.approx(0.5)
    assert coincidence_probability(rho, 30.0, 120.0) == pytest.approx(0.0, abs=1e-15)


def test_visibility_of_mixture_is_zero():
    assert visibility(mixed_component()) == pytest.approx(0.0, abs=1e-15)


def test_density_matrix_validation():
    with pytest.raises(InputDomainError):
        DensityMatrix4(np.eye(3))
    bad_trace = np.eye(4) / 2
    with pytest.raises(InputDomainError):
        DensityMatrix4(bad_trace)
    not_hermitian = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    not_hermitian[0, 1] = 0.3
    with pytest.raises(InputDomainError):
        DensityMatrix4(not_hermitian)
    negative = np.diag([0.75, 0.35, -0.1, 0.0])
    with pytest.raises(InputDomainError):
        DensityMatrix4(negative)


def test_density_matrix_is_read_only():
    rho = model_state(0.5)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 9.0


def test_document_round_trip():
    rho = model_state(0.63, 1.2)
    doc = rho.to_document()
    assert doc["basis"] == ["HH", "HV", "VH", "VV"]
    assert len(doc["matrix"]) == 16
    back = DensityMatrix4.from_document(doc)
    assert np.array_equal(back.matrix, rho.matrix)
    assert DensityMatrix4.from_json(rho.to_json()) == rho


def test_document_rejects_foreign_basis():
    doc = model_state(0.5).to_document()
    doc["basis"] = ["HH", "VH", "HV", "VV"]
    with pytest.raises(InputDomainError):
        DensityMatrix4.from_document(doc)


def test_polarization_kets():
    d = PolarizationKet.linear(45.0).vector()
    assert np.allclose(d, [1 / math.sqrt(2), 1 / math.sqrt(2)])
    r = PolarizationKet.circular_right().vector()
    assert np.allclose(r, [1 / math.sqrt(2), -1j / math.sqrt(2)])
    with pytest.raises(InputDomainError):
        PolarizationKet(1.0, 1.0)  # not normalized
