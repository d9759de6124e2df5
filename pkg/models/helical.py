# ============================================
# FILE: models/helical.py
# ============================================
from dataclasses import dataclass
from enum import Enum
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, PositiveFloat


class HelicalConfig(BaseModel):
    """Problem parameters: dimension, angular velocity, ball radius, Sommerfeld branch.

    ``sign`` selects the +/- branch of the boundary condition
    u_r + sign * Omega * u_phi = tau (outgoing vs. ingoing).
    """

    model_config = ConfigDict(frozen=True)

    n: Literal[2, 3] = 2
    omega: PositiveFloat = 1.0
    R: PositiveFloat = 1.0
    sign: Literal[1, -1] = 1

    @property
    def light_cylinder_radius(self) -> float:
        return 1.0 / self.omega

    @property
    def crosses_light_cylinder(self) -> bool:
        """True when the boundary sphere reaches into the hyperbolic region."""
        return self.omega * self.R > 1.0

    @property
    def out_of_theory(self) -> bool:
        # boundary tangent to the light cylinder
        return abs(self.omega * self.R - 1.0) <= 1e-14


class RegionTag(str, Enum):
    ELLIPTIC = 'Elliptic'
    LIGHT_CYLINDER = 'LightCylinder'
    HYPERBOLIC = 'Hyperbolic'


@dataclass(frozen=True)
class CoefficientSample:
    """Pointwise values of chi, sigma and the density-weighted coefficient h."""

    rho: float
    chi: float
    sigma: float
    h_rho_rho: float
    h_phi_phi: float
    h_zz: Optional[float] = None
