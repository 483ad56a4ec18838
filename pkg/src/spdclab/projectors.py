"""Tomographic projector set for the pair polarization state.

The measurement set is the 16 product combinations of {H, V, D, R} on
signal and idler, D being the +45 degree linear state and R the right
circular state.  The set is informationally complete but not a tight
frame, so linear reconstruction goes through the dual operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IncompleteProjectorSetError
from .states import PolarizationKet

SINGLE_QUBIT_LABELS = ("H", "V", "D", "R")

_SINGLE_QUBIT_KETS = {
    "H": PolarizationKet.linear(0.0),
    "V": PolarizationKet.linear(90.0),
    "D": PolarizationKet.linear(45.0),
    "R": PolarizationKet.circular_right(),
}


@dataclass(frozen=True)
class Projector:
    """Rank-1 product projector |s>|i><i|<s| with a two-letter label."""

    label: str
    signal: PolarizationKet
    idler: PolarizationKet
    matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        ket = np.kron(self.signal.vector(), self.idler.vector())
        mat = np.outer(ket, ket.conj())
        # rank-1 products of unit kets are idempotent, Hermitian, trace 1
        if np.max(np.abs(mat @ mat - mat)) > 1e-12:
            raise IncompleteProjectorSetError(f"projector {self.label} not idempotent")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    def probability(self, rho) -> float:
        return float(np.real(np.trace(np.asarray(rho) @ self.matrix)))


def standard_set() -> tuple[Projector, ...]:
    """The 16 product projectors, signal letter major (HH, HV, ... RR)."""
    out = []
    for s in SINGLE_QUBIT_LABELS:
        for i in SINGLE_QUBIT_LABELS:
            out.append(Projector(s + i, _SINGLE_QUBIT_KETS[s], _SINGLE_QUBIT_KETS[i]))
    return tuple(out)


@dataclass(frozen=True)
class DualBasis:
    """Operators G_mu with Tr[P_mu G_nu] = delta_mu_nu for a projector set."""

    labels: tuple[str, ...]
    operators: np.ndarray  # (16, 4, 4) Hermitian

    def __post_init__(self):
        ops = np.asarray(self.operators, dtype=complex)
        ops.flags.writeable = False
        object.__setattr__(self, "operators", ops)


def dual_basis(projectors) -> DualBasis:
    """Invert the Gram structure of the set; fails on degenerate sets."""
    projectors = tuple(projectors)
    stack = np.stack([p.matrix for p in projectors])
    n = stack.shape[0]
    gram = np.real(np.einsum("aij,bji->ab", stack, stack))
    # a duplicated or linearly dependent projector makes the Gram singular
    if n != 16 or np.linalg.matrix_rank(gram, tol=1e-10) < 16:
        raise IncompleteProjectorSetError("projector set not informationally complete")
    inv = np.linalg.inv(gram)
    duals = np.einsum("ab,bij->aij", inv, stack)
    duals = 0.5 * (duals + np.conj(np.transpose(duals, (0, 2, 1))))
    return DualBasis(tuple(p.label for p in projectors), duals)


def format_projector_table(projectors) -> str:
    """Plain-text table of labels and ket amplitudes for reports."""
    def amp(z: complex) -> str:
        return f"{z.real:+.4f}{z.imag:+.4f}j"

    lines = ["label  signal aH        signal aV        idler aH         idler aV"]
    for p in projectors:
        cells = [amp(p.signal.amp_h), amp(p.signal.amp_v), amp(p.idler.amp_h), amp(p.idler.amp_v)]
        lines.append(f"{p.label:<6} " + "  ".join(f"{c:<15}" for c in cells))
    return "\n".join(lines)
