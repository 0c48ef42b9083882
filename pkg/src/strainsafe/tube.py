"""Pressurized hyperelastic tube in principal stretch coordinates.

The tube inflates uniformly: the state is the stretch pair (hoop, axial)
plus its rate, a four dimensional ODE. The model carries

  * a constant diagonal mass matrix in kg*m (stretch coordinates absorb a
    reference length, hence the odd unit),
  * elastic restoring forces from the Neo-Hookean energy scaled by the
    reference wall areas,
  * first-order viscous forces with the same area scaling,
  * a pressure input resolved by virtual work on the enclosed volume.

Assembled as M lddot + F_v + F_e = F_ext u, or in control-affine form
sdot = drift(s) + input_matrix(s) * u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .material import MIN_STRETCH, MaterialParams, PrincipalTriplet, StretchPair


@dataclass(frozen=True)
class TubeGeometry:
    """Reference-configuration dimensions, SI units.

    cap_height is metadata only: the end caps are excluded from the wall
    mass and force integrals.
    """

    r_inner: float
    r_outer: float
    z_eff: float
    cap_height: float = 0.020
    density: float = 1070.0

    def __post_init__(self) -> None:
        if not (0.0 < self.r_inner < self.r_outer):
            raise ValueError(f"need 0 < r_inner < r_outer, got {self.r_inner!r}, {self.r_outer!r}")
        if self.z_eff <= 0.0 or self.density <= 0.0:
            raise ValueError("z_eff and density must be positive")
        if self.cap_height < 0.0:
            raise ValueError("cap_height must be non-negative")

    @property
    def wall_thickness(self) -> float:
        return self.r_outer - self.r_inner

    @property
    def mean_radius(self) -> float:
        return 0.5 * (self.r_outer + self.r_inner)

    @property
    def hoop_area(self) -> float:
        """Effective area scaling the hoop-direction wall forces, m^2."""
        return self.z_eff * self.wall_thickness

    @property
    def axial_area(self) -> float:
        """Effective area scaling the axial-direction wall forces, m^2."""
        return 2.0 * math.pi * self.mean_radius * self.wall_thickness


@dataclass(frozen=True)
class StretchState:
    """Dynamic state: stretches and stretch rates (1/s)."""

    stretch: StretchPair
    rate: tuple[float, float]

    def __post_init__(self) -> None:
        if not all(math.isfinite(r) for r in self.rate):
            raise ValueError(f"stretch rates must be finite, got {self.rate!r}")

    @classmethod
    def from_array(cls, x) -> "StretchState":
        return cls(StretchPair(float(x[0]), float(x[1])), (float(x[2]), float(x[3])))

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.stretch.lambda_theta, self.stretch.lambda_z, self.rate[0], self.rate[1]]
        )

    @classmethod
    def rest(cls) -> "StretchState":
        return cls(StretchPair(1.0, 1.0), (0.0, 0.0))


@dataclass(frozen=True)
class ControlInput:
    """Gauge pressure input, Pa. Negative pressure (suction) is allowed."""

    pressure: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.pressure):
            raise ValueError(f"pressure must be finite, got {self.pressure!r}")


def deformation_gradient(s: StretchPair) -> PrincipalTriplet:
    """Diagonal deformation gradient (radial, hoop, axial).

    The radial entry comes from incompressibility, so the product of the
    returned stretches is 1 up to floating point.
    """
    return PrincipalTriplet(s.radial(), s.lambda_theta, s.lambda_z)


def mass_matrix(g: TubeGeometry) -> np.ndarray:
    """Constant diagonal generalized mass, kg*m.

    Derived from the wall kinetic energy with displacements converted to
    stretches through diag(r_inner, z_eff).
    """
    ri, ro = g.r_inner, g.r_outer
    m_theta = g.density * math.pi * (ro**4 - ri**4) * g.z_eff / (2.0 * ri)
    m_z = g.density * math.pi / 3.0 * (ro**2 - ri**2) * g.z_eff**2
    return np.diag([m_theta, m_z])


def elastic_force(p: MaterialParams, g: TubeGeometry, s: StretchPair) -> np.ndarray:
    """Elastic restoring force in N, zero at the undeformed state.

    Componentwise this is area * lambda_i * dW/dlambda_i, the principal
    Cauchy stress term scaled by the reference wall areas.
    """
    lt, lz = s.lambda_theta, s.lambda_z
    inv = 1.0 / (lt * lt * lz * lz)
    return np.array(
        [
            p.mu * g.hoop_area * (lt * lt - inv),
            p.mu * g.axial_area * (lz * lz - inv),
        ]
    )


def viscous_force(p: MaterialParams, g: TubeGeometry, st: StretchState) -> np.ndarray:
    """First-order damping force in N, linear in the stretch rate."""
    return np.array(
        [
            p.eta * g.hoop_area * st.rate[0],
            p.eta * g.axial_area * st.rate[1],
        ]
    )


def external_force_vector(g: TubeGeometry, s: StretchPair) -> np.ndarray:
    """Pressure-to-force map in m^2 (force = this vector times pressure).

    Obtained by differentiating the enclosed volume with respect to the
    stretches and mapping back to the reference configuration with
    diag(r_inner, z_eff)^-1. Both components are positive.
    """
    lt, lz = s.lambda_theta, s.lambda_z
    return np.array(
        [
            2.0 * math.pi * g.r_inner * g.z_eff * lt * lz,
            math.pi * g.r_inner * g.r_inner * lt * lt,
        ]
    )


def enclosed_volume(g: TubeGeometry, s: StretchPair) -> float:
    """Inner volume of the deformed tube, m^3."""
    lt, lz = s.lambda_theta, s.lambda_z
    return math.pi * g.r_inner * g.r_inner * g.z_eff * lt * lt * lz


def drift(p: MaterialParams, g: TubeGeometry, st: StretchState) -> np.ndarray:
    """Unforced state derivative [rate; -M^-1 (F_v + F_e)]."""
    m = mass_matrix(g)
    f = viscous_force(p, g, st) + elastic_force(p, g, st.stretch)
    acc = -f / np.diag(m)
    return np.array([st.rate[0], st.rate[1], acc[0], acc[1]])


def input_matrix(g: TubeGeometry, s: StretchPair) -> np.ndarray:
    """Control column [0; 0; M^-1 F_ext]: pressure-to-state-derivative map."""
    m = mass_matrix(g)
    gain = external_force_vector(g, s) / np.diag(m)
    return np.array([0.0, 0.0, gain[0], gain[1]])


def state_derivative(p: MaterialParams, g: TubeGeometry, st: StretchState, u: float) -> np.ndarray:
    """Full control-affine derivative drift + input_matrix * u."""
    return drift(p, g, st) + input_matrix(g, st.stretch) * u


def make_rhs(p: MaterialParams, g: TubeGeometry):
    """Build a fast scalar right-hand side f(lt, lz, rt, rz, u) -> 4-tuple.

    Same dynamics as :func:`state_derivative` with the geometry constants
    folded in; used by the fixed-step integrator hot loop. Uses plain float
    arithmetic (no powers) so invalid states overflow to inf rather than
    raising, leaving fault detection to the caller's guard.
    """
    mm = mass_matrix(g)
    m_theta, m_z = float(mm[0, 0]), float(mm[1, 1])
    mu_a1 = p.mu * g.hoop_area
    mu_a2 = p.mu * g.axial_area
    eta_a1 = p.eta * g.hoop_area
    eta_a2 = p.eta * g.axial_area
    p_hoop = 2.0 * math.pi * g.r_inner * g.z_eff
    p_axial = math.pi * g.r_inner * g.r_inner

    def rhs(lt: float, lz: float, rt: float, rz: float, u: float):
        inv = 1.0 / (lt * lt * lz * lz)
        acc_t = (p_hoop * lt * lz * u - eta_a1 * rt - mu_a1 * (lt * lt - inv)) / m_theta
        acc_z = (p_axial * lt * lt * u - eta_a2 * rz - mu_a2 * (lz * lz - inv)) / m_z
        return rt, rz, acc_t, acc_z

    return rhs


def state_is_valid(lt: float, lz: float, rt: float, rz: float) -> bool:
    """Validity guard for integration: finite, stretches above the floor."""
    return (
        math.isfinite(lt)
        and math.isfinite(lz)
        and math.isfinite(rt)
        and math.isfinite(rz)
        and lt >= MIN_STRETCH
        and lz >= MIN_STRETCH
        and lt * lz >= MIN_STRETCH
    )
