"""Service handlers: pure functions from request models to response models.

Each handler resolves the (config, seed) pair, runs the core pipeline
and packs the result.  The FastAPI app and the command line client are
both thin wrappers around these functions, so in-process and HTTP use
give identical answers.  Commands that draw random numbers derive one
sub-seed per acquisition (base seed plus the acquisition's index), which
keeps multi-curve outputs deterministic yet decorrelated.
"""

from __future__ import annotations

import numpy as np

from .. import __version__
from ..bell import chsh_S_for_p
from ..config import RunConfig, build_source, config_hash
from ..dispersion import effective_spectrum
from ..errors import InputDomainError
from ..interference import default_tau_grid, envelope_width, fringe_pattern
from ..projectors import standard_set, format_projector_table
from ..simulate import (
    AcquisitionPlan,
    bell_acquisition,
    fit_visibility,
    simulate_counts,
    visibility_scan_angles,
)
from ..source import decoherence_parameter, position_averaged_p, propagation_delays, compensated_delay
from ..states import BASIS_LABELS, model_state, coincidence_probability, purity, visibility
from ..tomography import CountRecord, mle_reconstruct
from ..bell import ChshSettings
from . import schemas as sc

_FS = 1e15
_TOMO_LABELS = tuple(p.label for p in standard_set())


def _matrix_doc(matrix) -> sc.MatrixDocument:
    m = np.asarray(matrix, dtype=complex).reshape(-1)
    return sc.MatrixDocument(
        basis=list(BASIS_LABELS),
        matrix=[(v.real, v.imag) for v in m],
    )


def _count_entries(records) -> list[sc.CountEntry]:
    return [sc.CountEntry(label=r.label, count=int(r.count)) for r in records]


def _model_p(cfg: RunConfig) -> float:
    if cfg.tomography.state_p is not None:
        return cfg.tomography.state_p
    return decoherence_parameter(build_source(cfg))


def health() -> sc.HealthResponse:
    return sc.HealthResponse(status="ok", version=__version__)


def projector_set() -> sc.ProjectorSetResponse:
    projectors = standard_set()
    return sc.ProjectorSetResponse(
        labels=[p.label for p in projectors],
        projectors=[
            sc.ProjectorModel(
                label=p.label,
                signal=p.label[0],
                idler=p.label[1],
                matrix=_matrix_doc(p.matrix),
            )
            for p in projectors
        ],
        table=format_projector_table(projectors),
    )


def source_report(req: sc.SourceReportRequest) -> sc.SourceReportResponse:
    cfg = req.config
    comp_len = cfg.source.compensation.length_mm
    # one row per length; a configured retarder adds 0 deg / none / 90 deg
    # variants so the bracketing of the bare crystal is visible in one table
    variants = [(comp_len, 0.0), (0.0, 0.0), (comp_len, 90.0)] if comp_len > 0 else [(0.0, 0.0)]
    n_grid = cfg.source.position_average_grid
    rows = []
    for length_mm in cfg.source.crystal.report_lengths_mm:
        for c_len, c_ori in variants:
            src = build_source(
                cfg,
                crystal_length_mm=length_mm,
                compensation_length_mm=c_len,
                compensation_orientation_deg=c_ori,
            )
            tau_h, tau_v = propagation_delays(src)
            rows.append(
                sc.DelayRow(
                    length_mm=length_mm,
                    compensation_length_mm=c_len,
                    compensation_orientation_deg=c_ori,
                    tau_h_fs=tau_h * _FS,
                    tau_v_fs=tau_v * _FS,
                    delta_fs=abs(tau_h - tau_v) * _FS,
                    delta_effective_fs=compensated_delay(src) * _FS,
                    p_midpoint=decoherence_parameter(src),
                    p_position_averaged=position_averaged_p(src, n_grid=n_grid),
                )
            )
    return sc.SourceReportResponse(
        config_hash=config_hash(cfg), seed=req.resolved_seed(), rows=rows
    )


def visibility_scan(req: sc.VisibilityScanRequest) -> sc.VisibilityScanResponse:
    cfg = req.config
    seed = req.resolved_seed()
    scan = cfg.simulation.visibility_scan
    angles = visibility_scan_angles(scan.angle_step_deg)
    curves = []
    for i, length_mm in enumerate(scan.lengths_mm):
        p = decoherence_parameter(build_source(cfg, crystal_length_mm=length_mm))
        rho = model_state(p)
        probs = [coincidence_probability(rho, xi, scan.idler_angle_deg) for xi in angles]
        counts = fitted_v = fitted_sigma = None
        if scan.simulate:
            plan = AcquisitionPlan(
                mode="visibility_scan",
                settings=tuple((xi, scan.idler_angle_deg) for xi in angles),
                mean_events_per_setting=cfg.simulation.flux_per_setting,
                seed=seed + i,
                background_rate=cfg.simulation.background_rate,
            )
            records = simulate_counts(rho, plan)
            counts = [int(r.count) for r in records]
            fitted_v, fitted_sigma = fit_visibility(angles, counts)
        curves.append(
            sc.VisibilityCurve(
                length_mm=length_mm,
                p_model=p,
                probabilities=probs,
                counts=counts,
                fitted_visibility=fitted_v,
                fitted_sigma=fitted_sigma,
            )
        )
    return sc.VisibilityScanResponse(
        config_hash=config_hash(cfg),
        seed=seed,
        angles_deg=list(angles),
        idler_angle_deg=scan.idler_angle_deg,
        curves=curves,
    )


def bell(req: sc.BellRequest) -> sc.BellResponse:
    cfg = req.config
    seed = req.resolved_seed()
    bcfg = cfg.simulation.bell
    if bcfg.theta_step_deg <= 0:
        raise InputDomainError("theta step must be positive")
    n_steps = int(round(90.0 / bcfg.theta_step_deg))
    thetas = [i * bcfg.theta_step_deg for i in range(n_steps + 1)]
    curves = [
        sc.BellCurve(p=p, s_values=[chsh_S_for_p(p, t) for t in thetas])
        for p in bcfg.scan_p
    ]
    rho = model_state(bcfg.state_p)
    markers = []
    for j, theta in enumerate(bcfg.marker_thetas_deg):
        meas = bell_acquisition(
            rho,
            theta,
            bcfg.marker_flux,
            seed=seed + j,
            background_rate=cfg.simulation.background_rate,
        )
        markers.append(
            sc.BellMarker(
                theta_deg=theta,
                s_model=chsh_S_for_p(bcfg.state_p, theta),
                s_simulated=meas.s_value,
                sigma_s=meas.sigma_s,
                significance=meas.significance,
                correlations=list(meas.correlations),
                correlation_sigmas=list(meas.correlation_sigmas),
            )
        )
    return sc.BellResponse(
        config_hash=config_hash(cfg),
        seed=seed,
        state_p=bcfg.state_p,
        thetas_deg=thetas,
        curves=curves,
        markers=markers,
    )


def tomography(req: sc.TomographyRequest) -> sc.TomographyResponse:
    cfg = req.config
    seed = req.resolved_seed()
    if req.counts is not None:
        data = [CountRecord(label=c.label, count=float(c.count)) for c in req.counts]
        state_p = rho_model = None
    else:
        state_p = _model_p(cfg)
        rho_model = model_state(state_p)
        plan = AcquisitionPlan(
            mode="tomography",
            settings=_TOMO_LABELS,
            mean_events_per_setting=cfg.tomography.flux_per_setting,
            seed=seed,
            background_rate=cfg.simulation.background_rate,
        )
        data = simulate_counts(rho_model, plan)
    projectors = standard_set()
    rho_hat, diag = mle_reconstruct(
        data,
        projectors,
        optimizer=cfg.tomography.optimizer,
        restarts=cfg.tomography.restarts,
        scale=cfg.tomography.scale,
        seed=seed,
    )
    err = None
    if rho_model is not None:
        err = float(np.linalg.norm(rho_hat.matrix - rho_model.matrix))
    return sc.TomographyResponse(
        config_hash=config_hash(cfg),
        seed=seed,
        state_p=state_p,
        counts=_count_entries(data),
        rho_mle=_matrix_doc(rho_hat.matrix),
        rho_model=None if rho_model is None else _matrix_doc(rho_model.matrix),
        visibility=visibility(rho_hat),
        purity=purity(rho_hat),
        frobenius_error=err,
        diagnostics=sc.TomographyDiagnostics(**diag),
    )


def interference(req: sc.InterferenceRequest) -> sc.InterferenceResponse:
    cfg = req.config
    icfg = cfg.simulation.interference
    src = build_source(cfg)
    taus = default_tau_grid(icfg.tau_span_fs * 1e-15, icfg.n_tau)
    out = {}
    for mode in ("single", "coincidence"):
        spectrum = effective_spectrum(src, mode, n_points=icfg.spectrum_points)
        pattern = fringe_pattern(spectrum, taus)
        out[mode] = (spectrum, pattern)
    single_spec, single_pat = out["single"]
    coinc_spec, coinc_pat = out["coincidence"]
    include = req.include_pattern
    return sc.InterferenceResponse(
        config_hash=config_hash(cfg),
        seed=req.resolved_seed(),
        length_mm=cfg.source.crystal.length_mm,
        single_envelope_fwhm_fs=envelope_width(single_pat) * _FS,
        coincidence_envelope_fwhm_fs=envelope_width(coinc_pat) * _FS,
        single_spectrum_fwhm_nm=single_spec.fwhm_wavelength_m() * 1e9,
        coincidence_spectrum_fwhm_nm=coinc_spec.fwhm_wavelength_m() * 1e9,
        taus_fs=[t * _FS for t in taus] if include else [],
        single_normalized=list(single_pat.normalized()) if include else [],
        coincidence_normalized=list(coinc_pat.normalized()) if include else [],
    )


def simulate_counts_cmd(req: sc.SimulateCountsRequest) -> sc.SimulateCountsResponse:
    cfg = req.config
    seed = req.resolved_seed()
    state_p = req.state_p if req.state_p is not None else _model_p(cfg)
    if req.mode == "tomography":
        settings: tuple = _TOMO_LABELS
        flux = cfg.tomography.flux_per_setting
    elif req.mode == "visibility_scan":
        scan = cfg.simulation.visibility_scan
        settings = tuple(
            (xi, scan.idler_angle_deg)
            for xi in visibility_scan_angles(scan.angle_step_deg)
        )
        flux = cfg.simulation.flux_per_setting
    elif req.mode == "bell":
        theta = cfg.simulation.bell.marker_thetas_deg[0]
        settings = ChshSettings.from_theta(theta).angle_pairs()
        flux = cfg.simulation.bell.marker_flux
    else:
        raise InputDomainError(f"unknown acquisition mode {req.mode!r}")
    plan = AcquisitionPlan(
        mode=req.mode,
        settings=settings,
        mean_events_per_setting=req.flux if req.flux is not None else flux,
        seed=seed,
        background_rate=cfg.simulation.background_rate,
    )
    records = simulate_counts(model_state(state_p), plan)
    return sc.SimulateCountsResponse(
        config_hash=config_hash(cfg),
        seed=seed,
        mode=req.mode,
        state_p=state_p,
        counts=_count_entries(records),
    )
