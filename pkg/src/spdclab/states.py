"""Two-photon polarization states in the HH/HV/VH/VV basis.

The source model produces a one-parameter family

    rho(p, phi) = [[1/2, 0, 0, (p/2) e^{-i phi}],
                   [0,   0, 0, 0],
                   [0,   0, 0, 0],
                   [(p/2) e^{+i phi}, 0, 0, 1/2]]

interpolating between the maximally entangled |HH>+|VV> pair (p = 1) and an
even HH/VV mixture (p = 0).  Coincidence probabilities behind two linear
polarizers, the polarizer-scan visibility (equal to p) and the purity
(1 + p^2)/2 are the quantities measured downstream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError

__all__ = [
    "BASIS_LABELS",
    "PolarizationKet",
    "DensityMatrix4",
    "model_state",
    "mixed_component",
    "entangled_component",
    "coincidence_probability",
    "visibility",
    "purity",
]

BASIS_LABELS = ("HH", "HV", "VH", "VV")

_HERMITIAN_TOL = 1e-12
_TRACE_TOL = 1e-10
_EIGEN_TOL = -1e-9


@dataclass(frozen=True)
class PolarizationKet:
    """Single-photon polarization ket (amp_h, amp_v), unit norm."""

    amp_h: complex
    amp_v: complex

    def __post_init__(self):
        norm = abs(self.amp_h) ** 2 + abs(self.amp_v) ** 2
        if abs(norm - 1.0) > 1e-10:
            raise InputDomainError(f"ket norm {norm} != 1")

    @classmethod
    def linear(cls, angle_deg: float) -> "PolarizationKet":
        """Linear polarization at ``angle_deg`` from horizontal."""
        a = math.radians(angle_deg)
        return cls(complex(math.cos(a)), complex(math.sin(a)))

    @classmethod
    def circular_right(cls) -> "PolarizationKet":
        # convention: R = (H - iV)/sqrt(2)
        s = 1.0 / math.sqrt(2.0)
        return cls(complex(s), complex(0.0, -s))

    @classmethod
    def circular_left(cls) -> "PolarizationKet":
        s = 1.0 / math.sqrt(2.0)
        return cls(complex(s), complex(0.0, s))

    def vector(self) -> np.ndarray:
        return np.array([self.amp_h, self.amp_v], dtype=complex)

    def projector(self) -> np.ndarray:
        v = self.vector()
        return np.outer(v, v.conj())


class DensityMatrix4:
    """Validated 4x4 density matrix over the (HH, HV, VH, VV) basis.

    Construction enforces hermiticity, unit trace and positive
    semidefiniteness (up to small numeric slack); the stored array is
    read-only.  Use plain ndarrays for intermediate unphysical objects
    (e.g. raw linear-inversion output).
    """

    __slots__ = ("_matrix",)

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (4, 4):
            raise InputDomainError(f"expected a 4x4 matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > _HERMITIAN_TOL:
            raise InputDomainError("matrix is not hermitian")
        trace = m.trace().real
        if abs(trace - 1.0) > _TRACE_TOL:
            raise InputDomainError(f"trace {trace} != 1")
        eigmin = float(np.linalg.eigvalsh(m)[0])
        if eigmin < _EIGEN_TOL:
            raise InputDomainError(f"matrix has negative eigenvalue {eigmin:.3e}")
        m = 0.5 * (m + m.conj().T)
        m.flags.writeable = False
        object.__setattr__(self, "_matrix", m)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self._matrix.astype(dtype)
        return self._matrix

    def __repr__(self):
        return f"DensityMatrix4({np.array2string(self._matrix, precision=4)})"

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix4):
            return NotImplemented
        return np.array_equal(self._matrix, other._matrix)

    # -- serialization ------------------------------------------------------

    def to_document(self) -> dict:
        """JSON-able document: row-major (re, im) pairs over the fixed basis."""
        return {
            "basis": list(BASIS_LABELS),
            "matrix": [
                [value.real, value.imag] for value in self._matrix.reshape(-1)
            ],
        }

    @classmethod
    def from_document(cls, doc: dict) -> "DensityMatrix4":
        if tuple(doc.get("basis", ())) != BASIS_LABELS:
            raise InputDomainError(f"unexpected basis ordering {doc.get('basis')}")
        values = doc["matrix"]
        if len(values) != 16:
            raise InputDomainError("matrix document must hold 16 entries")
        m = np.array([complex(re, im) for re, im in values]).reshape(4, 4)
        return cls(m)

    def to_json(self) -> str:
        return json.dumps(self.to_document())

    @classmethod
    def from_json(cls, text: str) -> "DensityMatrix4":
        return cls.from_document(json.loads(text))


def mixed_component() -> DensityMatrix4:
    """Even incoherent HH/VV mixture (the p = 0 limit)."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = 0.5
    return DensityMatrix4(m)


def entangled_component() -> DensityMatrix4:
    """|Psi> = (|HH> + |VV>)/sqrt(2) projector (the p = 1, phi = 0 limit)."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = m[0, 3] = m[3, 0] = 0.5
    return DensityMatrix4(m)


def model_state(p: float, phi_rad: float = 0.0) -> DensityMatrix4:
    """Source output state for decoherence parameter ``p`` and corner phase
    ``phi_rad``.

    Equals p * |Psi><Psi| + (1 - p) * mixed_component() when phi_rad = 0.
    """
    if not (0.0 <= p <= 1.0):
        raise InputDomainError(f"decoherence parameter p={p} outside [0, 1]")
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = 0.5
    corner = 0.5 * p * np.exp(-1j * phi_rad)
    m[0, 3] = corner
    m[3, 0] = np.conj(corner)
    return DensityMatrix4(m)


def _as_matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix4):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def coincidence_probability(rho, signal_deg: float, idler_deg: float) -> float:
    """Probability of a joint pass behind linear polarizers at the given
    angles (degrees from horizontal)."""
    ket = np.kron(
        PolarizationKet.linear(signal_deg).vector(),
        PolarizationKet.linear(idler_deg).vector(),
    )
    value = ket.conj() @ _as_matrix(rho) @ ket
    return float(value.real)


def visibility(rho, idler_deg: float = 45.0) -> float:
    """Polarizer-scan visibility with the idler analyzer fixed.

    (P_max - P_min) / (P_max + P_min) over the signal angle, evaluated at
    the analytic extrema 45 deg and 135 deg of the scan.
    """
    p_max = coincidence_probability(rho, 45.0, idler_deg)
    p_min = coincidence_probability(rho, 135.0, idler_deg)
    total = p_max + p_min
    if total <= 0.0:
        raise InputDomainError("zero coincidence rate; visibility undefined")
    return (p_max - p_min) / total


def purity(rho) -> float:
    m = _as_matrix(rho)
    return float(np.trace(m @ m).real)
