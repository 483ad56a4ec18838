"""Two-crystal downconversion source simulator and analysis toolkit.

The package splits into a physics core (materials, source, dispersion,
interference), a polarization/statistics layer (states, projectors, bell,
tomography, simulate) and a configuration front end (config).  The FastAPI
service and the command line client live in ``spdclab.service`` and
``spdclab.cli``.
"""

from .errors import (
    IncompleteProjectorSetError,
    InputDomainError,
    NonConvergenceError,
    NumericalFailure,
)
from .materials import (
    DEFAULT_REFERENCE_TABLE,
    SPEED_OF_LIGHT,
    MaterialModel,
    ReferenceEntry,
    ReferenceTable,
)
from .source import (
    DelayReport,
    SourceConfig,
    build_delay_report,
    compensated_delay,
    decoherence_parameter,
    position_averaged_p,
    precompensation_delay,
    propagation_delays,
)
from .states import (
    DensityMatrix4,
    PolarizationKet,
    coincidence_probability,
    entangled_component,
    mixed_component,
    model_state,
    purity,
    visibility,
)
from .dispersion import (
    Spectrum,
    effective_spectrum,
    longitudinal_mismatch,
    matched_idler_angle,
    mismatch_function,
    transverse_profile,
)
from .interference import (
    FringePattern,
    default_tau_grid,
    envelope_width,
    fringe_pattern,
)
from .projectors import (
    DualBasis,
    Projector,
    dual_basis,
    format_projector_table,
    standard_set,
)
from .bell import (
    ChshSettings,
    chsh_S,
    chsh_S_for_p,
    chsh_scan,
    correlation_E,
    violation_significance,
)
from .tomography import (
    CountRecord,
    LinearInversionResult,
    TriangularParam,
    cholesky_params,
    linear_inversion,
    log_likelihood,
    mle_reconstruct,
    rho_from_T,
)
from .simulate import (
    AcquisitionPlan,
    BellMeasurement,
    bell_acquisition,
    fit_visibility,
    simulate_counts,
    visibility_scan_angles,
)
from .config import (
    RunConfig,
    build_material,
    build_source,
    config_hash,
    load_config,
)

__version__ = "0.1.0"

__all__ = [
    "AcquisitionPlan",
    "BellMeasurement",
    "ChshSettings",
    "CountRecord",
    "DEFAULT_REFERENCE_TABLE",
    "DelayReport",
    "DensityMatrix4",
    "DualBasis",
    "FringePattern",
    "IncompleteProjectorSetError",
    "InputDomainError",
    "LinearInversionResult",
    "MaterialModel",
    "NonConvergenceError",
    "NumericalFailure",
    "PolarizationKet",
    "Projector",
    "ReferenceEntry",
    "ReferenceTable",
    "RunConfig",
    "SPEED_OF_LIGHT",
    "SourceConfig",
    "Spectrum",
    "TriangularParam",
    "bell_acquisition",
    "build_delay_report",
    "build_material",
    "build_source",
    "chsh_S",
    "chsh_S_for_p",
    "chsh_scan",
    "cholesky_params",
    "coincidence_probability",
    "compensated_delay",
    "config_hash",
    "correlation_E",
    "decoherence_parameter",
    "default_tau_grid",
    "dual_basis",
    "effective_spectrum",
    "entangled_component",
    "envelope_width",
    "fit_visibility",
    "format_projector_table",
    "fringe_pattern",
    "linear_inversion",
    "log_likelihood",
    "longitudinal_mismatch",
    "matched_idler_angle",
    "mismatch_function",
    "mixed_component",
    "mle_reconstruct",
    "model_state",
    "position_averaged_p",
    "precompensation_delay",
    "propagation_delays",
    "purity",
    "rho_from_T",
    "simulate_counts",
    "standard_set",
    "transverse_profile",
    "violation_significance",
    "visibility",
    "visibility_scan_angles",
]
