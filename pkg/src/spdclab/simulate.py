"""Synthetic coincidence-count generation and derived measurements.

Counts per setting are Poisson with mean N0 * Tr[rho P]; the generator
is seeded so every acquisition is reproducible.  On top of the raw
sampler sit the polarizer-scan visibility fit and the 16-setting CHSH
acquisition with Poisson error propagation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bell import ChshSettings
from .errors import InputDomainError, NumericalFailure
from .projectors import standard_set
from .states import DensityMatrix4, PolarizationKet
from .tomography import CountRecord

_MODES = ("tomography", "visibility_scan", "bell")


@dataclass(frozen=True)
class AcquisitionPlan:
    """What to measure: mode, settings, mean events per setting, seed.

    Settings are projector labels (tomography) or (signal, idler)
    polarizer angle pairs in degrees (scans and Bell runs).  The
    background rate is a fraction of N0 added to every setting's mean;
    it defaults to zero to match an accidentals-free experiment.
    """

    mode: str
    settings: tuple
    mean_events_per_setting: float
    seed: int
    background_rate: float = 0.0

    def __post_init__(self):
        if self.mode not in _MODES:
            raise InputDomainError(f"unknown acquisition mode {self.mode!r}")
        if not self.settings:
            raise InputDomainError("acquisition needs at least one setting")
        if not (self.mean_events_per_setting > 0.0):
            raise InputDomainError("mean events per setting must be positive")
        if self.background_rate < 0.0:
            raise InputDomainError("background rate cannot be negative")
        object.__setattr__(self, "settings", tuple(self.settings))


def _setting_projectors(plan: AcquisitionPlan):
    """(label, 4x4 projector) per setting."""
    if plan.mode == "tomography":
        by_label = {p.label: p.matrix for p in standard_set()}
        out = []
        for label in plan.settings:
            if label not in by_label:
                raise InputDomainError(f"unknown projector label {label!r}")
            out.append((label, by_label[label]))
        return out
    out = []
    for xi_s, xi_i in plan.settings:
        ket = np.kron(
            PolarizationKet.linear(float(xi_s)).vector(),
            PolarizationKet.linear(float(xi_i)).vector(),
        )
        out.append((f"{float(xi_s):g}_{float(xi_i):g}", np.outer(ket, ket.conj())))
    return out


def simulate_counts(rho: DensityMatrix4, plan: AcquisitionPlan) -> list[CountRecord]:
    """Poisson draw for every setting; deterministic for a given seed."""
    rng = np.random.default_rng(plan.seed)
    arr = np.asarray(rho)
    records = []
    for label, projector in _setting_projectors(plan):
        prob = float(np.real(np.trace(arr @ projector)))
        lam = plan.mean_events_per_setting * (max(prob, 0.0) + plan.background_rate)
        records.append(CountRecord(label, int(rng.poisson(lam))))
    return records


def visibility_scan_angles(step_deg: float = 2.0) -> tuple[float, ...]:
    """Signal polarizer grid over a half turn, inclusive of both ends."""
    if step_deg <= 0.0:
        raise InputDomainError("angle step must be positive")
    n = int(round(180.0 / step_deg))
    return tuple(i * step_deg for i in range(n + 1))


def fit_visibility(angles_deg, counts) -> tuple[float, float]:
    """Least-squares visibility of a polarizer scan.

    Fits c0 + c1 sin(2 xi) + c2 cos(2 xi) and returns
    (sqrt(c1^2+c2^2)/c0, its propagated standard error).
    """
    angles = np.radians(np.asarray(angles_deg, dtype=float))
    y = np.asarray(counts, dtype=float)
    if angles.size != y.size or angles.size < 4:
        raise InputDomainError("scan fit needs matching angle/count arrays, >= 4 points")
    design = np.column_stack([np.ones_like(angles), np.sin(2 * angles), np.cos(2 * angles)])
    coef, residuals, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 3:
        raise NumericalFailure("degenerate polarizer-scan design matrix")
    c0, c1, c2 = coef
    if c0 <= 0.0:
        raise NumericalFailure("scan fit found a nonpositive mean rate")
    amp = math.hypot(c1, c2)
    vis = amp / c0
    dof = max(angles.size - 3, 1)
    ssr = float(residuals[0]) if residuals.size else float(np.sum((design @ coef - y) ** 2))
    cov = ssr / dof * np.linalg.inv(design.T @ design)
    if amp == 0.0:
        grad = np.array([0.0, 1.0 / c0, 1.0 / c0])
    else:
        grad = np.array([-vis / c0, c1 / (amp * c0), c2 / (amp * c0)])
    sigma = float(math.sqrt(max(grad @ cov @ grad, 0.0)))
    return float(vis), sigma


@dataclass(frozen=True)
class BellMeasurement:
    """Simulated CHSH acquisition: S, its Poisson error, and the pieces."""

    theta_deg: float
    s_value: float
    sigma_s: float
    correlations: tuple[float, ...]
    correlation_sigmas: tuple[float, ...]
    counts: tuple[CountRecord, ...] = field(repr=False)
    seed: int = 0

    @property
    def significance(self) -> float:
        return (self.s_value - 2.0) / self.sigma_s


def bell_acquisition(
    rho: DensityMatrix4,
    theta_deg: float,
    mean_events_per_setting: float,
    seed: int,
    background_rate: float = 0.0,
) -> BellMeasurement:
    """Simulate the 16 polarizer configurations of the theta scheme.

    Each correlation uses its four settings as E = (n++ - n+- - n-+ +
    n--)/total; the error propagates the Poisson variances through that
    quotient, then through the S sum.
    """
    pairs = ChshSettings.from_theta(theta_deg).angle_pairs()
    plan = AcquisitionPlan("bell", pairs, mean_events_per_setting, seed, background_rate)
    records = simulate_counts(rho, plan)
    correlations, variances = [], []
    for group in range(4):
        n_pp, n_pm, n_mp, n_mm = (float(records[4 * group + k].count) for k in range(4))
        total = n_pp + n_pm + n_mp + n_mm
        if total <= 0.0:
            raise NumericalFailure(f"no events in correlation group {group}")
        e_val = (n_pp - n_pm - n_mp + n_mm) / total
        var = ((1.0 - e_val) ** 2 * (n_pp + n_mm) + (1.0 + e_val) ** 2 * (n_pm + n_mp)) / total**2
        correlations.append(e_val)
        variances.append(var)
    s_value = correlations[0] - correlations[1] + correlations[2] + correlations[3]
    sigma_s = math.sqrt(sum(variances))
    if sigma_s <= 0.0:
        raise NumericalFailure("degenerate Bell acquisition: zero propagated error")
    return BellMeasurement(
        theta_deg=float(theta_deg),
        s_value=float(s_value),
        sigma_s=float(sigma_s),
        correlations=tuple(correlations),
        correlation_sigmas=tuple(math.sqrt(v) for v in variances),
        counts=tuple(records),
        seed=seed,
    )
