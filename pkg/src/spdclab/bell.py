"""CHSH correlations, the S parameter and its single-angle scan."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputDomainError
from .states import DensityMatrix4, coincidence_probability, model_state


@dataclass(frozen=True)
class ChshSettings:
    """Polarizer angles (deg) for the four CHSH correlations."""

    a_deg: float
    a_prime_deg: float
    b_deg: float
    b_prime_deg: float

    def __post_init__(self):
        for v in (self.a_deg, self.a_prime_deg, self.b_deg, self.b_prime_deg):
            if not math.isfinite(v):
                raise InputDomainError("CHSH angles must be finite")

    @classmethod
    def from_theta(cls, theta_deg: float) -> "ChshSettings":
        """Single-angle scheme a = 0, b = theta, a' = 2*theta, b' = 3*theta."""
        return cls(0.0, 2.0 * theta_deg, theta_deg, 3.0 * theta_deg)

    def angle_pairs(self) -> tuple[tuple[float, float], ...]:
        """The 16 polarizer settings feeding the four correlations.

        Grouped four per correlation in the order (a,b), (a,b'), (a',b),
        (a',b'); within a group: ++, +-, -+, -- with "-" meaning +90 deg.
        """
        pairs = []
        for alpha, beta in (
            (self.a_deg, self.b_deg),
            (self.a_deg, self.b_prime_deg),
            (self.a_prime_deg, self.b_deg),
            (self.a_prime_deg, self.b_prime_deg),
        ):
            pairs.extend(
                [
                    (alpha, beta),
                    (alpha, beta + 90.0),
                    (alpha + 90.0, beta),
                    (alpha + 90.0, beta + 90.0),
                ]
            )
        return tuple(pairs)


def correlation_E(rho: DensityMatrix4, alpha_deg: float, beta_deg: float) -> float:
    """E = P(a,b) + P(a+90,b+90) - P(a,b+90) - P(a+90,b)."""
    p_pp = coincidence_probability(rho, alpha_deg, beta_deg)
    p_mm = coincidence_probability(rho, alpha_deg + 90.0, beta_deg + 90.0)
    p_pm = coincidence_probability(rho, alpha_deg, beta_deg + 90.0)
    p_mp = coincidence_probability(rho, alpha_deg + 90.0, beta_deg)
    return p_pp + p_mm - p_pm - p_mp


def chsh_S(rho: DensityMatrix4, settings: ChshSettings) -> float:
    """S = E(a,b) - E(a,b') + E(a',b) + E(a',b')."""
    return (
        correlation_E(rho, settings.a_deg, settings.b_deg)
        - correlation_E(rho, settings.a_deg, settings.b_prime_deg)
        + correlation_E(rho, settings.a_prime_deg, settings.b_deg)
        + correlation_E(rho, settings.a_prime_deg, settings.b_prime_deg)
    )


def chsh_S_for_p(p: float, theta_deg: float, phi_rad: float = 0.0) -> float:
    """S of the model state at decoherence p under the theta scheme."""
    return chsh_S(model_state(p, phi_rad), ChshSettings.from_theta(theta_deg))


def chsh_scan(p_values, theta_grid_deg) -> list[dict]:
    """S(theta) rows for each decoherence value; one dict per grid point."""
    states = [(float(p), model_state(float(p))) for p in p_values]
    rows = []
    for theta in theta_grid_deg:
        settings = ChshSettings.from_theta(float(theta))
        row = {"theta_deg": float(theta)}
        for p, rho in states:
            row[f"S_p{p:g}"] = chsh_S(rho, settings)
        rows.append(row)
    return rows


def violation_significance(s_value: float, sigma_s: float) -> float:
    """Standard deviations of CHSH violation above the classical bound."""
    if sigma_s <= 0.0:
        raise InputDomainError("sigma_S must be positive")
    return (s_value - 2.0) / sigma_s
