"""Maximum-likelihood density-matrix reconstruction from counts.

The state is parametrized as rho = T†T / Tr(T†T) with T complex lower
triangular (real diagonal), which makes every candidate physical.  The
likelihood is the multinomial one over the 16 measured settings with a
trace-pinning term, so the total-event Lagrange condition Tr(T†T) = 1
holds exactly at any optimum; for a tight projector frame it reduces to
the plain penalized form with multiplier equal to the event total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    IncompleteProjectorSetError,
    InputDomainError,
    NonConvergenceError,
)
from .optim import (
    annealed_maximize,
    max_abs_gradient,
    nelder_mead_maximize,
    parabolic_polish,
)
from .projectors import DualBasis, Projector, dual_basis
from .states import DensityMatrix4

_LOWER_ROWS = (1, 2, 2, 3, 3, 3)
_LOWER_COLS = (0, 0, 1, 0, 1, 2)
_LN_FLOOR = 1e-300


@dataclass(frozen=True)
class TriangularParam:
    """16 real parameters: 4 diagonal entries then 6 (re, im) pairs."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != 16:
            raise InputDomainError("triangular parametrization needs 16 reals")
        if not all(math.isfinite(v) for v in self.values):
            raise InputDomainError("triangular parameters must be finite")

    def matrix(self) -> np.ndarray:
        return _t_matrix(np.asarray(self.values, dtype=float))


@dataclass(frozen=True)
class CountRecord:
    """One measured setting: projector label and coincidence count."""

    label: str
    count: float
    duration_s: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.count) and self.count >= 0.0):
            raise InputDomainError(f"count for {self.label!r} must be nonnegative")


def _t_matrix(params: np.ndarray) -> np.ndarray:
    t = np.zeros((4, 4), dtype=complex)
    t[np.arange(4), np.arange(4)] = params[:4]
    t[_LOWER_ROWS, _LOWER_COLS] = params[4::2] + 1j * params[5::2]
    return t


def rho_from_T(param: TriangularParam) -> DensityMatrix4:
    """rho = T†T normalized; positive semidefinite by construction."""
    t = param.matrix()
    a = t.conj().T @ t
    trace = float(np.real(np.trace(a)))
    if trace <= 0.0:
        raise InputDomainError("degenerate parametrization: T†T has no weight")
    return DensityMatrix4(a / trace)


def cholesky_params(matrix: np.ndarray, eig_clip: float = 1e-6) -> TriangularParam:
    """Parameters of the closest-physical T for a Hermitian estimate.

    Negative eigenvalues are clipped to ``eig_clip`` and the spectrum is
    renormalized, so even a slightly unphysical linear-inversion output
    yields a usable starting point.  The lower-triangular factor with
    rho = T†T comes from a Cholesky on the index-reversed matrix.
    """
    m = np.asarray(matrix, dtype=complex)
    herm = 0.5 * (m + m.conj().T)
    vals, vecs = np.linalg.eigh(herm)
    vals = np.clip(vals, eig_clip, None)
    vals = vals / vals.sum()
    clipped = (vecs * vals) @ vecs.conj().T
    flip = np.arange(3, -1, -1)
    lower = np.linalg.cholesky(clipped[np.ix_(flip, flip)])
    t = lower.conj().T[np.ix_(flip, flip)]
    params = np.empty(16)
    params[:4] = np.real(np.diag(t))
    params[4::2] = np.real(t[_LOWER_ROWS, _LOWER_COLS])
    params[5::2] = np.imag(t[_LOWER_ROWS, _LOWER_COLS])
    return TriangularParam(tuple(params))


def _match_counts(data, projectors) -> tuple[np.ndarray, np.ndarray]:
    """Counts aligned to the projector order; every label required once."""
    projectors = tuple(projectors)
    by_label = {}
    for rec in data:
        if rec.label in by_label:
            raise InputDomainError(f"duplicate count record for {rec.label!r}")
        by_label[rec.label] = float(rec.count)
    missing = [p.label for p in projectors if p.label not in by_label]
    if missing:
        raise IncompleteProjectorSetError(f"missing count records: {', '.join(missing)}")
    counts = np.array([by_label[p.label] for p in projectors])
    stack = np.stack([p.matrix for p in projectors])
    return counts, stack


def _log_likelihood_raw(params: np.ndarray, counts: np.ndarray, stack: np.ndarray, total: float) -> float:
    t = _t_matrix(params)
    a = t.conj().T @ t
    trace_a = float(np.real(np.trace(a)))
    if trace_a <= 0.0:
        return -np.inf
    q = np.real(np.einsum("aij,ji->a", stack, a))
    positive = counts > 0.0
    if np.any(q[positive] <= 0.0):
        return -np.inf
    q_sum = float(q.sum())
    if q_sum <= 0.0:
        return -np.inf
    terms = counts[positive] * np.log(np.maximum(q[positive], _LN_FLOOR))
    pin = total * (trace_a - math.log(trace_a) - 1.0)
    return float(terms.sum() - total * math.log(q_sum) - pin)


def log_likelihood(param: TriangularParam, data, projectors) -> float:
    """Penalized log likelihood of the counts under rho(T).

    Settings with a zero count contribute nothing; a nonpositive
    predicted rate for an observed setting yields -inf so optimizers
    reject the candidate outright.
    """
    counts, stack = _match_counts(data, projectors)
    if not np.any(counts > 0.0):
        raise InputDomainError("need at least one nonzero count")
    return _log_likelihood_raw(
        np.asarray(param.values, dtype=float), counts, stack, float(counts.sum())
    )


@dataclass(frozen=True)
class LinearInversionResult:
    """Dual-basis estimate; possibly unphysical, hence not a DensityMatrix4."""

    matrix: np.ndarray
    physical: bool
    min_eigenvalue: float
    events_estimate: float


def linear_inversion(data, projectors, dual: DualBasis | None = None) -> LinearInversionResult:
    """rho_hat = sum_mu (n_mu / N_hat) Gamma_mu.

    N_hat is the summed count over the orthonormal sub-basis HH, HV,
    VH, VV, which measures the total pair flux per setting window.
    """
    projectors = tuple(projectors)
    counts, _ = _match_counts(data, projectors)
    if dual is None:
        dual = dual_basis(projectors)
    labels = [p.label for p in projectors]
    n_hat = 0.0
    for basis_label in ("HH", "HV", "VH", "VV"):
        if basis_label not in labels:
            raise IncompleteProjectorSetError(
                f"normalization basis label {basis_label!r} not measured"
            )
        n_hat += counts[labels.index(basis_label)]
    if n_hat <= 0.0:
        raise InputDomainError("no events in the normalization sub-basis")
    freqs = counts / n_hat
    matrix = np.einsum("a,aij->ij", freqs, dual.operators)
    matrix = 0.5 * (matrix + matrix.conj().T)
    min_eig = float(np.linalg.eigvalsh(matrix).min())
    matrix.flags.writeable = False
    return LinearInversionResult(matrix, min_eig >= -1e-9, min_eig, float(n_hat))


def mle_reconstruct(
    data,
    projectors,
    optimizer: str = "simplex",
    restarts: int = 5,
    scale: float = 0.05,
    rel_tol: float = 1e-9,
    max_iter: int = 20000,
    seed: int = 0,
    gradient_tol_factor: float = 1e-4,
    polish_step: float = 1e-5,
) -> tuple[DensityMatrix4, dict]:
    """Maximum-likelihood state with search diagnostics.

    The search starts at the Cholesky factor of the (clipped) linear
    inversion, runs the requested optimizer and finishes with a
    parabolic polish that enforces a stationary point to within
    ``gradient_tol_factor`` times the event total per parameter.
    """
    if optimizer not in ("simplex", "annealing"):
        raise InputDomainError(f"unknown optimizer {optimizer!r}")
    projectors = tuple(projectors)
    counts, stack = _match_counts(data, projectors)
    if not np.any(counts > 0.0):
        raise InputDomainError("need at least one nonzero count")
    total = float(counts.sum())

    def objective(x: np.ndarray) -> float:
        return _log_likelihood_raw(x, counts, stack, total)

    start = linear_inversion(data, projectors)
    x0 = np.asarray(cholesky_params(start.matrix).values)
    if optimizer == "simplex":
        result = nelder_mead_maximize(
            objective, x0, scale=scale, rel_tol=rel_tol, max_iter=max_iter, restarts=restarts
        )
    else:
        result = annealed_maximize(
            objective,
            x0,
            scale=scale,
            rng=np.random.default_rng(seed),
            rel_tol=rel_tol,
            max_iter=max_iter,
        )
    gradient_tol = gradient_tol_factor * total
    x, value = result.x, result.value
    polish_evals = 0
    grad_max = np.inf
    for _ in range(4):
        x, value, evals, _ = parabolic_polish(
            objective, x, value, step=polish_step, gradient_tol=gradient_tol
        )
        polish_evals += evals
        # the pin term's optimum along the overall scale of T is exactly
        # Tr(T†T) = 1, so project onto it rather than leaving a residual
        x = x / math.sqrt(float(np.sum(np.square(x))))
        value = objective(x)
        grad_max, evals = max_abs_gradient(objective, x, step=polish_step)
        polish_evals += evals + 1
        if grad_max <= gradient_tol:
            break
    diagnostics = {
        "final_log_likelihood": value,
        "evaluations": result.evaluations + polish_evals,
        "iterations": result.iterations,
        "optimizer": optimizer,
        "restarts_used": result.restarts_used,
        "seed": seed,
        "converged": bool(result.converged and grad_max <= gradient_tol),
        "gradient_max": grad_max,
        "trace_TdT": float(np.sum(np.square(x))),
        "linear_inversion_physical": start.physical,
        "linear_inversion_min_eigenvalue": start.min_eigenvalue,
    }
    if not diagnostics["converged"]:
        err = NonConvergenceError(
            "likelihood search did not reach a stationary point", diagnostics=diagnostics
        )
        raise err
    rho = rho_from_T(TriangularParam(tuple(x)))
    return rho, diagnostics
