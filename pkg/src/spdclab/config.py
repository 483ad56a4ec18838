"""Run configuration: parsing, validation, hashing, model building.

The YAML document has four sections (source, material, simulation,
tomography) plus top-level seed/verbosity/output_dir; every field has
the published experiment's value as its default, so an empty config
reproduces the reference setup.  A short digest of the physics sections
is embedded in every output file for provenance (seed and output
location stay out of the digest so the same physics keeps the same
hash).
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import yaml
from pydantic import BaseModel, ConfigDict, field_validator

from .errors import InputDomainError
from .materials import (
    DEFAULT_REFERENCE_TABLE,
    SPEED_OF_LIGHT,
    MaterialModel,
    ReferenceEntry,
    ReferenceTable,
)
from .source import SourceConfig


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CrystalSection(_Section):
    length_mm: float = 0.5
    report_lengths_mm: tuple[float, ...] = (0.5, 1.0, 3.0)


class PumpSection(_Section):
    wavelength_nm: float = 405.0
    coherence_time_fs: float = 544.0


class AnglesSection(_Section):
    phi1_deg: float = 1.807
    phi2_deg: float = 1.84
    phi3_deg: float = 1.806
    cone_internal_deg: float = 1.8
    cone_external_deg: float = 3.0


class CompensationSection(_Section):
    length_mm: float = 0.0
    orientation_deg: float = 0.0


class SourceSection(_Section):
    crystal: CrystalSection = CrystalSection()
    pump: PumpSection = PumpSection()
    angles: AnglesSection = AnglesSection()
    compensation: CompensationSection = CompensationSection()
    beam_waist_mm: float = 2.0
    coincidence_fwhm_nm: float = 27.0
    position_average_grid: int = 128


class SellmeierSection(_Section):
    o: tuple[float, float, float, float] = (2.7359, 0.01878, 0.01822, 0.01354)
    e: tuple[float, float, float, float] = (2.3753, 0.01224, 0.01667, 0.01516)


class ReferenceEntrySection(_Section):
    n: float
    group_index: float


class ReferenceTableSection(_Section):
    pump_o: ReferenceEntrySection
    pump_e: ReferenceEntrySection
    downconv_o: ReferenceEntrySection
    downconv_e: ReferenceEntrySection


class MaterialSection(_Section):
    sellmeier: SellmeierSection = SellmeierSection()
    validity_um: tuple[float, float] = (0.35, 1.2)
    cut_angle_deg: float | None = None
    reference_table: ReferenceTableSection | None = None


class VisibilityScanSection(_Section):
    lengths_mm: tuple[float, ...] = (0.5, 1.0, 3.0)
    angle_step_deg: float = 2.0
    idler_angle_deg: float = 45.0
    simulate: bool = True


class BellSection(_Section):
    scan_p: tuple[float, ...] = (1.0, 0.7, 0.5)
    theta_step_deg: float = 1.0
    marker_thetas_deg: tuple[float, ...] = (16.0, 24.0, 40.0)
    marker_flux: float = 3800.0
    state_p: float = 0.77


class InterferenceSection(_Section):
    tau_span_fs: float = 300.0
    n_tau: int = 8192
    spectrum_points: int = 2048


class SimulationSection(_Section):
    flux_per_setting: float = 10000.0
    background_rate: float = 0.0
    visibility_scan: VisibilityScanSection = VisibilityScanSection()
    bell: BellSection = BellSection()
    interference: InterferenceSection = InterferenceSection()


class TomographySection(_Section):
    optimizer: str = "simplex"
    restarts: int = 5
    scale: float = 0.05
    flux_per_setting: float = 40000.0
    state_p: float | None = None  # None: use the source model's p

    @field_validator("optimizer")
    @classmethod
    def _optimizer(cls, v: str) -> str:
        if v not in ("simplex", "annealing"):
            raise ValueError("optimizer must be 'simplex' or 'annealing'")
        return v


class RunConfig(_Section):
    seed: int = 12345
    verbosity: int = 1
    output_dir: str = "runs"
    source: SourceSection = SourceSection()
    material: MaterialSection = MaterialSection()
    simulation: SimulationSection = SimulationSection()
    tomography: TomographySection = TomographySection()


def load_config(path: str | Path | None) -> RunConfig:
    """Parse a YAML config file; None or an empty file yields defaults."""
    if path is None:
        return RunConfig()
    text = Path(path).read_text()
    raw = yaml.safe_load(text)
    if raw is None:
        return RunConfig()
    if not isinstance(raw, dict):
        raise InputDomainError("config file must contain a mapping at top level")
    return RunConfig(**raw)


def config_hash(cfg: RunConfig) -> str:
    """Short digest of the resolved physics/analysis configuration.

    Seed, verbosity and output_dir are excluded: they do not change what
    is being modelled, and the seed is reported alongside the hash.
    """
    doc = cfg.model_dump(mode="json", exclude={"seed", "verbosity", "output_dir"})
    blob = yaml.safe_dump(doc, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def build_material(cfg: RunConfig) -> MaterialModel:
    mat = cfg.material
    if mat.reference_table is None:
        table = DEFAULT_REFERENCE_TABLE
    else:
        table = ReferenceTable(
            **{
                slot: ReferenceEntry(index=e.n, group_index=e.group_index)
                for slot, e in (
                    ("pump_o", mat.reference_table.pump_o),
                    ("pump_e", mat.reference_table.pump_e),
                    ("downconv_o", mat.reference_table.downconv_o),
                    ("downconv_e", mat.reference_table.downconv_e),
                )
            }
        )
    pump_m = cfg.source.pump.wavelength_nm * 1e-9
    return MaterialModel(
        sellmeier_o=mat.sellmeier.o,
        sellmeier_e=mat.sellmeier.e,
        pump_wavelength_m=pump_m,
        downconv_wavelength_m=2.0 * pump_m,
        cut_angle_deg=mat.cut_angle_deg,
        reference_table=table,
        validity_um=mat.validity_um,
    )


def build_source(
    cfg: RunConfig,
    crystal_length_mm: float | None = None,
    compensation_length_mm: float | None = None,
    compensation_orientation_deg: float | None = None,
) -> SourceConfig:
    """SourceConfig for the configured (or overridden) crystal length."""
    src = cfg.source
    material = build_material(cfg)
    length = src.crystal.length_mm if crystal_length_mm is None else crystal_length_mm
    comp_len = (
        src.compensation.length_mm if compensation_length_mm is None else compensation_length_mm
    )
    comp_ori = (
        src.compensation.orientation_deg
        if compensation_orientation_deg is None
        else compensation_orientation_deg
    )
    table = material.reference_table
    return SourceConfig(
        crystal_length_m=length * 1e-3,
        coherence_time_s=src.pump.coherence_time_fs * 1e-15,
        pump_wavelength_m=src.pump.wavelength_nm * 1e-9,
        phi1_deg=src.angles.phi1_deg,
        phi2_deg=src.angles.phi2_deg,
        phi3_deg=src.angles.phi3_deg,
        cone_external_deg=src.angles.cone_external_deg,
        cone_internal_deg=src.angles.cone_internal_deg,
        beam_waist_m=src.beam_waist_mm * 1e-3,
        coincidence_fwhm_nm=src.coincidence_fwhm_nm,
        compensation_length_m=comp_len * 1e-3,
        compensation_orientation_deg=comp_ori,
        material=material,
        vg_pump_o=SPEED_OF_LIGHT / table.pump_o.group_index,
        vg_pump_e=SPEED_OF_LIGHT / table.pump_e.group_index,
        vg_down_o=SPEED_OF_LIGHT / table.downconv_o.group_index,
        vg_down_e=SPEED_OF_LIGHT / table.downconv_e.group_index,
    )
