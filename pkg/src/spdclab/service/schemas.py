"""Request and response models for the HTTP service.

Every POST body embeds a full ``RunConfig`` (defaults apply when the
field is omitted) plus an optional seed override, so a request is as
reproducible as a config file on disk.  Density matrices travel as
row-major (re, im) pairs over the fixed HH/HV/VH/VV basis, the same
document shape the density-matrix JSON files use.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..config import RunConfig


class MatrixDocument(BaseModel):
    """4x4 complex matrix as 16 row-major (re, im) pairs."""

    basis: list[str]
    matrix: list[tuple[float, float]]


class CountEntry(BaseModel):
    label: str
    count: int = Field(ge=0)


class RunRequest(BaseModel):
    config: RunConfig = Field(default_factory=RunConfig)
    seed: int | None = None  # overrides config.seed when given

    def resolved_seed(self) -> int:
        return self.config.seed if self.seed is None else self.seed


class HealthResponse(BaseModel):
    status: str
    version: str


class ProjectorModel(BaseModel):
    label: str
    signal: str
    idler: str
    matrix: MatrixDocument


class ProjectorSetResponse(BaseModel):
    labels: list[str]
    projectors: list[ProjectorModel]
    table: str


class SourceReportRequest(RunRequest):
    pass


class DelayRow(BaseModel):
    length_mm: float
    compensation_length_mm: float
    compensation_orientation_deg: float
    tau_h_fs: float
    tau_v_fs: float
    delta_fs: float
    delta_effective_fs: float
    p_midpoint: float
    p_position_averaged: float


class SourceReportResponse(BaseModel):
    config_hash: str
    seed: int
    rows: list[DelayRow]


class VisibilityScanRequest(RunRequest):
    pass


class VisibilityCurve(BaseModel):
    length_mm: float
    p_model: float
    probabilities: list[float]
    counts: list[int] | None = None
    fitted_visibility: float | None = None
    fitted_sigma: float | None = None


class VisibilityScanResponse(BaseModel):
    config_hash: str
    seed: int
    angles_deg: list[float]
    idler_angle_deg: float
    curves: list[VisibilityCurve]


class BellRequest(RunRequest):
    pass


class BellCurve(BaseModel):
    p: float
    s_values: list[float]


class BellMarker(BaseModel):
    theta_deg: float
    s_model: float
    s_simulated: float
    sigma_s: float
    significance: float
    correlations: list[float]
    correlation_sigmas: list[float]


class BellResponse(BaseModel):
    config_hash: str
    seed: int
    state_p: float
    thetas_deg: list[float]
    curves: list[BellCurve]
    markers: list[BellMarker]


class TomographyRequest(RunRequest):
    counts: list[CountEntry] | None = None  # measured data; None simulates


class TomographyDiagnostics(BaseModel):
    final_log_likelihood: float
    evaluations: int
    iterations: int
    optimizer: str
    restarts_used: int
    seed: int
    converged: bool
    gradient_max: float
    trace_TdT: float
    linear_inversion_physical: bool
    linear_inversion_min_eigenvalue: float


class TomographyResponse(BaseModel):
    config_hash: str
    seed: int
    state_p: float | None
    counts: list[CountEntry]
    rho_mle: MatrixDocument
    rho_model: MatrixDocument | None
    visibility: float
    purity: float
    frobenius_error: float | None
    diagnostics: TomographyDiagnostics


class InterferenceRequest(RunRequest):
    include_pattern: bool = True


class InterferenceResponse(BaseModel):
    config_hash: str
    seed: int
    length_mm: float
    single_envelope_fwhm_fs: float
    coincidence_envelope_fwhm_fs: float
    single_spectrum_fwhm_nm: float
    coincidence_spectrum_fwhm_nm: float
    taus_fs: list[float]
    single_normalized: list[float]
    coincidence_normalized: list[float]


class SimulateCountsRequest(RunRequest):
    mode: str = "tomography"
    state_p: float | None = None
    flux: float | None = None


class SimulateCountsResponse(BaseModel):
    config_hash: str
    seed: int
    mode: str
    state_p: float
    counts: list[CountEntry]
