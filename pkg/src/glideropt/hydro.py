"""Analytic hydrodynamics: deterministic lift/drag coefficients for a hull.

The model combines classical components: flat-plate skin friction, a
Hoerner-style fineness-ratio form factor for parasitic drag, a Helmbold
finite-wing lift slope, and a quadratic induced-drag polar with a fixed
Oswald factor.  It is smooth in the hull features and the angle of
attack, deterministic, and captures the slenderness/lift/induced-drag
trade-offs that make hull optimization non-trivial.  It is not a CFD
substitute and makes no claim of matching tunnel data.

Both coefficients are normalized by the volumetric reference area
``ref_area = volume^(2/3)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OutOfEnvelopeError
from .geometry.mesh import MeshFeatures

# Handbook seawater properties; freestream default is a typical glide speed.
SEAWATER_DENSITY = 1025.0      # kg/m^3
SEAWATER_VISCOSITY = 1.08e-3   # Pa s
DEFAULT_SPEED = 0.3            # m/s

TRANSITION_REYNOLDS = 5.0e5    # laminar/turbulent flat-plate switch
OSWALD_FACTOR = 0.8
ASPECT_RATIO_LIMITS = (0.1, 20.0)
MAX_FINENESS = 10.0            # d/L clamp for the form-factor polynomial
ENVELOPE_DEG = 45.0            # oracle validity: |alpha| <= 45 degrees


@dataclass(frozen=True)
class FlowConditions:
    """Fluid properties and freestream speed."""

    rho: float = SEAWATER_DENSITY
    mu: float = SEAWATER_VISCOSITY
    speed: float = DEFAULT_SPEED

    def __post_init__(self):
        if self.rho <= 0 or self.mu <= 0 or self.speed <= 0:
            raise ValueError(f"flow conditions must be positive: {self}")


@dataclass(frozen=True)
class AngleOfAttack:
    """Angle between body axis and incoming flow, stored in radians."""

    radians: float

    def __post_init__(self):
        if not abs(self.radians) <= math.pi / 2:
            raise ValueError(f"|alpha| must be <= 90 deg, got {self.degrees:.1f} deg")

    @classmethod
    def from_degrees(cls, degrees: float) -> "AngleOfAttack":
        return cls(math.radians(degrees))

    @property
    def degrees(self) -> float:
        return math.degrees(self.radians)


@dataclass(frozen=True)
class HydroCoeffs:
    """Drag and lift coefficients, ref_area-normalized."""

    cd: float
    cl: float

    def __post_init__(self):
        if not (math.isfinite(self.cd) and math.isfinite(self.cl)):
            raise ValueError(f"coefficients must be finite: {self}")
        if self.cd <= 0:
            raise ValueError(f"drag coefficient must be positive, got {self.cd}")


def reynolds(flow: FlowConditions, length: float) -> float:
    """Reynolds number rho U L / mu."""
    if length < 0:
        raise ValueError(f"length must be non-negative, got {length}")
    return flow.rho * flow.speed * length / flow.mu


def skin_friction(re: float) -> float:
    """Flat-plate friction coefficient: Blasius laminar below the
    transition Reynolds number, 1/5-power turbulent above."""
    if re <= 0:
        raise ValueError(f"Reynolds number must be positive, got {re}")
    if re < TRANSITION_REYNOLDS:
        return 1.328 / math.sqrt(re)
    return 0.074 * re ** (-0.2)


def oracle_coefficients(
    features: MeshFeatures, alpha: AngleOfAttack, flow: FlowConditions
) -> HydroCoeffs:
    """Map hull features and angle of attack to (cd, cl).

    Lift: Helmbold slope 2 pi AR / (AR + 2) on the planform, rescaled to
    the volumetric reference area, with the sin*cos falloff that caps
    lift at 45 degrees.  Drag: skin friction times a fineness form
    factor on the wetted area, plus the induced-drag polar.
    """
    if abs(alpha.degrees) > ENVELOPE_DEG:
        raise OutOfEnvelopeError(
            f"alpha {alpha.degrees:.1f} deg outside the +/-{ENVELOPE_DEG:.0f} deg envelope"
        )

    ar_lo, ar_hi = ASPECT_RATIO_LIMITS
    aspect = min(max(features.span ** 2 / features.planform_area, ar_lo), ar_hi)
    lift_slope = 2.0 * math.pi * aspect / (aspect + 2.0)
    cl = (
        lift_slope
        * math.sin(alpha.radians)
        * math.cos(alpha.radians)
        * features.planform_area
        / features.ref_area
    )

    fineness = min(features.max_diameter / features.length, MAX_FINENESS)
    form_factor = 1.0 + 1.5 * fineness ** 1.5 + 7.0 * fineness ** 3
    cf = skin_friction(reynolds(flow, features.length))
    cd0 = cf * form_factor * features.wetted_area / features.ref_area

    cd_induced = (
        cl ** 2
        / (math.pi * OSWALD_FACTOR * aspect)
        * features.ref_area
        / features.planform_area
    )
    return HydroCoeffs(cd=cd0 + cd_induced, cl=cl)


def efficiency(coeffs: HydroCoeffs) -> float:
    """Lift-to-drag ratio cl / cd, the glider's efficiency metric."""
    if coeffs.cd <= 0:
        raise ValueError(f"drag coefficient must be positive, got {coeffs.cd}")
    return coeffs.cl / coeffs.cd
