"""Birefringent material model for the down-conversion crystals.

Refractive indices follow a three-term Sellmeier form

    n^2(lam) = a + b / (lam^2 - c) - d * lam^2,      lam in micrometres,

with separate coefficient sets for the ordinary and the principal
extraordinary branch of a negative uniaxial crystal.  The built-in defaults
are the standard beta-barium-borate coefficients, valid over roughly
0.35-1.2 um.

Extraordinary rays relevant here propagate at the crystal cut angle, so the
public ``"e"`` branch returns the *effective* index

    1 / n_e^2(theta) = cos^2(theta) / n_o^2 + sin^2(theta) / n_e^2,

where theta is the angle between the wave vector and the optic axis.  When no
cut angle is supplied it is solved in closed form from exact degenerate
phase matching at the internal emission angle, which also zeroes the
band-centre longitudinal mismatch.

Group indices n_g = n - lam * dn/dlam are computed from the analytic
derivative of the Sellmeier form.  A reference table of indices and group
indices at the pump and down-conversion wavelengths is carried alongside the
formula; ``table_deviations`` quantifies the agreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.constants import c as SPEED_OF_LIGHT

__all__ = [
    "ReferenceEntry",
    "ReferenceTable",
    "MaterialModel",
    "BBO_SELLMEIER_O",
    "BBO_SELLMEIER_E",
    "DEFAULT_REFERENCE_TABLE",
    "SPEED_OF_LIGHT",
]

# (a, b, c, d) with n^2 = a + b/(lam^2 - c) - d lam^2, lam in um.
BBO_SELLMEIER_O = (2.7359, 0.01878, 0.01822, 0.01354)
BBO_SELLMEIER_E = (2.3753, 0.01224, 0.01667, 0.01516)

_BRANCHES = ("o", "e")


@dataclass(frozen=True)
class ReferenceEntry:
    """Tabulated index and group index for one (wavelength, branch) pair."""

    index: float
    group_index: float


@dataclass(frozen=True)
class ReferenceTable:
    """Reference indices at the pump / down-conversion wavelengths.

    The extraordinary entries are effective indices at the crystal cut angle,
    not principal values.
    """

    pump_o: ReferenceEntry
    pump_e: ReferenceEntry
    downconv_o: ReferenceEntry
    downconv_e: ReferenceEntry

    def entry(self, wave: str, branch: str) -> ReferenceEntry:
        return getattr(self, f"{wave}_{branch}")


DEFAULT_REFERENCE_TABLE = ReferenceTable(
    pump_o=ReferenceEntry(index=1.691719, group_index=1.77878),
    pump_e=ReferenceEntry(index=1.659273, group_index=1.73901),
    downconv_o=ReferenceEntry(index=1.659984, group_index=1.68376),
    downconv_e=ReferenceEntry(index=1.632171, group_index=1.65483),
)


def _sellmeier_n2(coeffs, lam_um: float) -> float:
    a, b, c_, d = coeffs
    return a + b / (lam_um * lam_um - c_) - d * lam_um * lam_um


def _sellmeier_dn2(coeffs, lam_um: float) -> float:
    # d(n^2)/dlam, per micrometre
    _, b, c_, d = coeffs
    return -2.0 * lam_um * (b / (lam_um * lam_um - c_) ** 2 + d)


@dataclass(frozen=True)
class MaterialModel:
    """Dispersion model of one crystal, branch-aware.

    Parameters
    ----------
    sellmeier_o, sellmeier_e:
        Coefficient 4-tuples for the ordinary and principal extraordinary
        branches.
    pump_wavelength_m, downconv_wavelength_m:
        Reference wavelengths (405 nm pump, 810 nm degenerate pair).
    cut_angle_deg:
        Wave-vector angle to the optic axis for extraordinary propagation.
        ``None`` means "solve from degenerate phase matching at
        ``phase_match_internal_deg``".
    reference_table:
        Tabulated indices/group indices the formula is validated against.
    validity_um:
        Wavelength window (um) inside which the Sellmeier form is trusted;
        queries outside raise :class:`InputDomainError`.
    """

    sellmeier_o: tuple = BBO_SELLMEIER_O
    sellmeier_e: tuple = BBO_SELLMEIER_E
    pump_wavelength_m: float = 405e-9
    downconv_wavelength_m: float = 810e-9
    cut_angle_deg: float | None = None
    phase_match_internal_deg: float = 1.8
    reference_table: ReferenceTable = field(default=DEFAULT_REFERENCE_TABLE)
    validity_um: tuple = (0.35, 1.2)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_mapping(cls, data: dict) -> "MaterialModel":
        """Build from a config mapping (``sellmeier.o``/``.e`` lists plus an
        optional ``reference_table`` section)."""
        kwargs = {}
        sellmeier = data.get("sellmeier", {})
        if "o" in sellmeier:
            kwargs["sellmeier_o"] = tuple(float(x) for x in sellmeier["o"])
        if "e" in sellmeier:
            kwargs["sellmeier_e"] = tuple(float(x) for x in sellmeier["e"])
        table = data.get("reference_table")
        if table:
            kwargs["reference_table"] = ReferenceTable(
                **{
                    key: ReferenceEntry(
                        index=float(entry["n"]),
                        group_index=float(entry["group_index"]),
                    )
                    for key, entry in table.items()
                }
            )
        if "cut_angle_deg" in data and data["cut_angle_deg"] is not None:
            kwargs["cut_angle_deg"] = float(data["cut_angle_deg"])
        if "validity_um" in data:
            kwargs["validity_um"] = tuple(float(x) for x in data["validity_um"])
        return cls(**kwargs)

    # -- internals ---------------------------------------------------------

    def _check_domain(self, lam_um: float) -> None:
        lo, hi = self.validity_um
        if not (lo <= lam_um <= hi):
            from .errors import InputDomainError

            raise InputDomainError(
                f"wavelength {lam_um:.4f} um outside dispersion validity "
                f"range [{lo}, {hi}] um"
            )

    def _check_branch(self, branch: str) -> None:
        if branch not in _BRANCHES:
            from .errors import InputDomainError

            raise InputDomainError(f"unknown branch {branch!r}, expected 'o' or 'e'")

    @property
    def cut_angle_rad(self) -> float:
        """Cut angle (radians); solved from degenerate matching if unset.

        Degenerate type-I matching with both photons at the internal angle
        Theta requires n_e(theta_cut; lam_p) = n_o(2 lam_p) cos(Theta), which
        inverts in closed form through the index ellipsoid.
        """
        if self.cut_angle_deg is not None:
            return math.radians(self.cut_angle_deg)
        lam_p_um = self.pump_wavelength_m * 1e6
        lam_0_um = self.downconv_wavelength_m * 1e6
        n_target = math.sqrt(_sellmeier_n2(self.sellmeier_o, lam_0_um)) * math.cos(
            math.radians(self.phase_match_internal_deg)
        )
        inv_o = 1.0 / _sellmeier_n2(self.sellmeier_o, lam_p_um)
        inv_e = 1.0 / _sellmeier_n2(self.sellmeier_e, lam_p_um)
        sin2 = (1.0 / n_target**2 - inv_o) / (inv_e - inv_o)
        if not (0.0 <= sin2 <= 1.0):
            from .errors import NumericalFailure

            raise NumericalFailure(
                "degenerate phase matching has no real cut angle for this material"
            )
        return math.asin(math.sqrt(sin2))

    # -- public queries ----------------------------------------------------

    def index(self, wavelength_m: float, branch: str) -> float:
        """Refractive index; branch ``"e"`` is effective at the cut angle."""
        self._check_branch(branch)
        lam_um = wavelength_m * 1e6
        self._check_domain(lam_um)
        n_o2 = _sellmeier_n2(self.sellmeier_o, lam_um)
        if branch == "o":
            return math.sqrt(n_o2)
        n_e2 = _sellmeier_n2(self.sellmeier_e, lam_um)
        theta = self.cut_angle_rad
        inv = math.cos(theta) ** 2 / n_o2 + math.sin(theta) ** 2 / n_e2
        return 1.0 / math.sqrt(inv)

    def principal_index(self, wavelength_m: float, branch: str) -> float:
        """Raw Sellmeier index (extraordinary = principal, on-axis value)."""
        self._check_branch(branch)
        lam_um = wavelength_m * 1e6
        self._check_domain(lam_um)
        coeffs = self.sellmeier_o if branch == "o" else self.sellmeier_e
        return math.sqrt(_sellmeier_n2(coeffs, lam_um))

    def group_index(self, wavelength_m: float, branch: str) -> float:
        """n_g = n - lam dn/dlam from the analytic Sellmeier derivative."""
        self._check_branch(branch)
        lam_um = wavelength_m * 1e6
        self._check_domain(lam_um)
        n_o2 = _sellmeier_n2(self.sellmeier_o, lam_um)
        dn_o2 = _sellmeier_dn2(self.sellmeier_o, lam_um)
        if branch == "o":
            n = math.sqrt(n_o2)
            dn = dn_o2 / (2.0 * n)
            return n - lam_um * dn
        n_e2 = _sellmeier_n2(self.sellmeier_e, lam_um)
        dn_e2 = _sellmeier_dn2(self.sellmeier_e, lam_um)
        theta = self.cut_angle_rad
        cos2, sin2 = math.cos(theta) ** 2, math.sin(theta) ** 2
        inv = cos2 / n_o2 + sin2 / n_e2
        n = 1.0 / math.sqrt(inv)
        dinv = -cos2 * dn_o2 / n_o2**2 - sin2 * dn_e2 / n_e2**2
        dn = -0.5 * n**3 * dinv
        return n - lam_um * dn

    def group_velocity(self, wavelength_m: float, branch: str) -> float:
        return SPEED_OF_LIGHT / self.group_index(wavelength_m, branch)

    def wavenumber(self, wavelength_m: float, branch: str) -> float:
        """k = 2 pi n(lam) / lam in rad/m."""
        return 2.0 * math.pi * self.index(wavelength_m, branch) / wavelength_m

    def table_deviations(self) -> dict:
        """Absolute formula-vs-table deviations for all eight entries."""
        out = {}
        for wave, lam in (
            ("pump", self.pump_wavelength_m),
            ("downconv", self.downconv_wavelength_m),
        ):
            for branch in _BRANCHES:
                entry = self.reference_table.entry(wave, branch)
                out[f"{wave}_{branch}_n"] = abs(self.index(lam, branch) - entry.index)
                out[f"{wave}_{branch}_group"] = abs(
                    self.group_index(lam, branch) - entry.group_index
                )
        return out
