"""Maximum-likelihood reconstruction and its triangular parametrization."""

import math

import numpy as np
import pytest

from spdclab import (
    AcquisitionPlan,
    CountRecord,
    TriangularParam,
    cholesky_params,
    linear_inversion,
    log_likelihood,
    mle_reconstruct,
    model_state,
    simulate_counts,
    standard_set,
)
from spdclab.errors import (
    IncompleteProjectorSetError,
    InputDomainError,
    NonConvergenceError,
)
from spdclab.states import DensityMatrix4
from spdclab.tomography import rho_from_T


@pytest.fixture(scope="module")
def projectors():
    return standard_set()


@pytest.fixture(scope="module")
def labels(projectors):
    return tuple(p.label for p in projectors)


def _exact_counts(rho, projectors, total=1e6):
    return [
        CountRecord(label=p.label, count=total * p.probability(rho)) for p in projectors
    ]


# -- parametrization ----------------------------------------------------------


def test_uniform_diagonal_params_give_maximally_mixed():
    params = [0.5, 0.5, 0.5, 0.5] + [0.0] * 12
    rho = rho_from_T(TriangularParam(values=tuple(params)))
    assert np.allclose(rho.matrix, np.eye(4) / 4)


def test_rho_from_T_normalizes_scale():
    params = np.zeros(16)
    params[:4] = 3.0  # un-normalized T: rho must still have unit trace
    rho = rho_from_T(TriangularParam(values=tuple(params)))
    assert np.trace(rho.matrix).real == pytest.approx(1.0)


def test_zero_params_rejected():
    with pytest.raises(InputDomainError):
        rho_from_T(TriangularParam(values=(0.0,) * 16))


def test_cholesky_params_invert_rho_from_T():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(300):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho).real
        back = rho_from_T(cholesky_params(rho)).matrix
        worst = max(worst, float(np.max(np.abs(back - rho))))
    assert worst < 1e-6  # eigenvalue clipping bounds the round-trip error


def test_cholesky_params_handle_rank_deficient_states():
    rho = model_state(1.0)  # pure Bell state, rank 1
    back = rho_from_T(cholesky_params(rho.matrix)).matrix
    assert np.max(np.abs(back - rho.matrix)) < 1e-5


# -- likelihood ---------------------------------------------------------------


def test_likelihood_stationary_at_true_state(projectors):
    # full-rank mixture so the parametrization hits the state exactly
    mixed = 0.8 * model_state(0.6).matrix + 0.2 * np.eye(4) / 4
    rho = DensityMatrix4(mixed)
    data = _exact_counts(rho, projectors)
    x0 = np.asarray(cholesky_params(rho.matrix).values)

    def objective(x):
        return log_likelihood(TriangularParam(values=tuple(x)), data, projectors)

    base = objective(x0)
    step = 1e-6
    worst = 0.0
    for k in range(16):
        xp, xm = x0.copy(), x0.copy()
        xp[k] += step
        xm[k] -= step
        worst = max(worst, abs(objective(xp) - objective(xm)) / (2 * step))
    # gradient per count: stationarity at the generating state
    assert worst / 1e6 < 1e-6
    assert math.isfinite(base)


def test_likelihood_doubles_with_counts(projectors):
    rho = model_state(0.6)
    param = cholesky_params(model_state(0.5).matrix)
    data = _exact_counts(rho, projectors, total=1e4)
    doubled = [CountRecord(label=r.label, count=2 * r.count) for r in data]
    l1 = log_likelihood(param, data, projectors)
    l2 = log_likelihood(param, doubled, projectors)
    assert l2 == pytest.approx(2 * l1, rel=1e-12)


def test_likelihood_minus_infinity_on_impossible_count(projectors):
    # candidate assigning exactly zero weight to an observed setting
    param = TriangularParam(values=(0.0, 0.5, 0.5, 0.5) + (0.0,) * 12)
    data = [
        CountRecord(label=p.label, count=100.0 if p.label == "HH" else 50.0)
        for p in standard_set()
    ]
    assert log_likelihood(param, data, projectors) == -math.inf


def test_likelihood_requires_counts(projectors):
    data = [CountRecord(label=p.label, count=0.0) for p in standard_set()]
    with pytest.raises(InputDomainError):
        log_likelihood(cholesky_params(model_state(0.5).matrix), data, projectors)


def test_duplicate_labels_rejected(projectors, labels):
    data = [CountRecord(label="HH", count=10.0) for _ in range(16)]
    with pytest.raises(InputDomainError):
        log_likelihood(cholesky_params(model_state(0.5).matrix), data, projectors)


# -- linear inversion ---------------------------------------------------------


def test_linear_inversion_exact_probabilities(projectors):
    for p in (0.15, 0.77, 1.0):
        rho = model_state(p)
        result = linear_inversion(_exact_counts(rho, projectors), projectors)
        assert np.max(np.abs(result.matrix - rho.matrix)) < 1e-10
        assert result.physical


def test_linear_inversion_events_estimate(projectors):
    rho = model_state(0.5)
    result = linear_inversion(_exact_counts(rho, projectors, total=2e4), projectors)
    # HH + HV + VH + VV probabilities sum to one for any state
    assert result.events_estimate == pytest.approx(2e4, rel=1e-12)


def test_linear_inversion_flags_unphysical_noise(projectors, labels):
    # frozen: seed 0 at mean 1000 on a nearly pure state dips negative
    plan = AcquisitionPlan("tomography", labels, 1000.0, 0)
    data = simulate_counts(model_state(0.95), plan)
    result = linear_inversion(data, projectors)
    assert not result.physical
    assert result.min_eigenvalue < -1e-3


def test_linear_inversion_requires_basis_labels(projectors):
    data = [
        CountRecord(label=p.label, count=100.0)
        for p in projectors
        if p.label != "VV"
    ]
    with pytest.raises(IncompleteProjectorSetError):
        linear_inversion(data, projectors)


# -- maximum likelihood -------------------------------------------------------


def test_mle_noiseless_recovers_state(projectors):
    rho = model_state(0.73)
    data = _exact_counts(rho, projectors)
    rho_hat, diag = mle_reconstruct(data, projectors, restarts=2, seed=1)
    assert float(np.linalg.norm(rho_hat.matrix - rho.matrix)) < 1e-3
    assert diag["converged"]
    assert abs(diag["trace_TdT"] - 1.0) < 1e-6
    assert diag["gradient_max"] <= 1e-4 * 1e6


def test_mle_output_always_physical(projectors, labels):
    for seed in range(3):
        plan = AcquisitionPlan("tomography", labels, 2000.0, seed)
        data = simulate_counts(model_state(0.9), plan)
        rho_hat, _ = mle_reconstruct(data, projectors, restarts=2, seed=seed)
        m = rho_hat.matrix
        assert np.allclose(m, m.conj().T, atol=1e-12)
        assert np.trace(m).real == pytest.approx(1.0, abs=1e-9)
        assert np.linalg.eigvalsh(m)[0] >= -1e-9


def test_mle_poisson_accuracy(projectors, labels):
    rho = model_state(0.7287470373023908)
    errors = []
    for seed in range(5):
        plan = AcquisitionPlan("tomography", labels, 40000.0, seed)
        data = simulate_counts(rho, plan)
        rho_hat, _ = mle_reconstruct(data, projectors, restarts=2, seed=seed)
        errors.append(float(np.linalg.norm(rho_hat.matrix - rho.matrix)))
    assert max(errors) < 0.02


def test_mle_optimizers_agree(projectors, labels):
    plan = AcquisitionPlan("tomography", labels, 40000.0, 3)
    data = simulate_counts(model_state(0.73), plan)
    rho_s, _ = mle_reconstruct(data, projectors, optimizer="simplex", restarts=2, seed=11)
    rho_a, _ = mle_reconstruct(data, projectors, optimizer="annealing", restarts=1, seed=11)
    assert float(np.linalg.norm(rho_s.matrix - rho_a.matrix)) < 5e-3


def test_mle_deterministic(projectors, labels):
    plan = AcquisitionPlan("tomography", labels, 30000.0, 9)
    data = simulate_counts(model_state(0.6), plan)
    rho_1, diag_1 = mle_reconstruct(data, projectors, restarts=2, seed=5)
    rho_2, diag_2 = mle_reconstruct(data, projectors, restarts=2, seed=5)
    assert np.array_equal(rho_1.matrix, rho_2.matrix)
    assert diag_1 == diag_2


def test_mle_reports_non_convergence(projectors, labels):
    plan = AcquisitionPlan("tomography", labels, 40000.0, 3)
    data = simulate_counts(model_state(0.73), plan)
    with pytest.raises(NonConvergenceError) as info:
        mle_reconstruct(data, projectors, max_iter=3, restarts=1)
    assert info.value.diagnostics["converged"] is False
    assert "gradient_max" in info.value.diagnostics


def test_mle_rejects_unknown_optimizer(projectors, labels):
    data = _exact_counts(model_state(0.5), projectors)
    with pytest.raises(InputDomainError):
        mle_reconstruct(data, projectors, optimizer="gradient-descent")


def test_count_record_validation():
    with pytest.raises(InputDomainError):
        CountRecord(label="HH", count=-1.0)
    with pytest.raises(InputDomainError):
        CountRecord(label="HH", count=math.nan)


def test_triangular_param_validation():
    with pytest.raises(InputDomainError):
        TriangularParam(values=(1.0,) * 15)
    with pytest.raises(InputDomainError):
        TriangularParam(values=(math.inf,) + (0.0,) * 15)
