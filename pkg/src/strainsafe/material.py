"""Incompressible Neo-Hookean constitutive layer.

Everything in this module is expressed in principal stretch coordinates.
The tube-relevant two-stretch form eliminates the radial stretch through
the incompressibility constraint (lambda_r = 1 / (lambda_theta * lambda_z)),
so the stored energy density becomes

    W(lt, lz) = mu/2 * (lt^2 + lz^2 + 1/(lt^2 lz^2) - 3)    [J/m^3]

with analytic gradient and Hessian used by the barrier machinery. W is
strictly convex on the positive quadrant (the Hessian determinant is
mu^2 * (1 + 3a + 3b + 5c^2) with a, b, c > 0), so its sublevel sets, and
hence the safe set, are convex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Reject stretches below this to keep the 1/lambda^3 terms representable.
MIN_STRETCH = 1e-6


class CalibrationError(ValueError):
    """Raised when tensile data cannot pin down a shear modulus."""


def _require_finite_positive(name: str, value: float, minimum: float = 0.0) -> None:
    if not math.isfinite(value) or value <= minimum:
        raise ValueError(f"{name} must be finite and > {minimum}, got {value!r}")


@dataclass(frozen=True)
class MaterialParams:
    """Incompressible Neo-Hookean solid with first-order damping.

    mu:  low-strain shear modulus, Pa (> 0)
    eta: damping coefficient, Pa*s (>= 0); 0 means purely hyperelastic
    """

    mu: float
    eta: float = 0.0

    def __post_init__(self) -> None:
        _require_finite_positive("mu", self.mu)
        if not math.isfinite(self.eta) or self.eta < 0.0:
            raise ValueError(f"eta must be finite and >= 0, got {self.eta!r}")


@dataclass(frozen=True)
class StretchPair:
    """Circumferential and axial principal stretches of the tube wall.

    The radial stretch is never stored; it is implied by incompressibility.
    """

    lambda_theta: float
    lambda_z: float

    def __post_init__(self) -> None:
        for name, value in (("lambda_theta", self.lambda_theta), ("lambda_z", self.lambda_z)):
            if not math.isfinite(value) or value < MIN_STRETCH:
                raise ValueError(f"{name} must be finite and >= {MIN_STRETCH}, got {value!r}")

    def radial(self) -> float:
        """Radial stretch implied by volume preservation."""
        return 1.0 / (self.lambda_theta * self.lambda_z)


@dataclass(frozen=True)
class PrincipalTriplet:
    """Full set of three principal stretches.

    Use :meth:`incompressible` or :meth:`uniaxial` to construct triplets
    that satisfy lambda_1 * lambda_2 * lambda_3 = 1 by construction.
    """

    lambda_1: float
    lambda_2: float
    lambda_3: float

    def __post_init__(self) -> None:
        for name in ("lambda_1", "lambda_2", "lambda_3"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")

    @classmethod
    def incompressible(cls, lambda_1: float, lambda_2: float) -> "PrincipalTriplet":
        """Third stretch from the volume-preservation constraint."""
        return cls(lambda_1, lambda_2, 1.0 / (lambda_1 * lambda_2))

    @classmethod
    def uniaxial(cls, stretch: float) -> "PrincipalTriplet":
        """Uniaxial tension: lateral stretches are 1/sqrt(stretch)."""
        lateral = 1.0 / math.sqrt(stretch)
        return cls(stretch, lateral, lateral)

    def as_array(self) -> np.ndarray:
        return np.array([self.lambda_1, self.lambda_2, self.lambda_3])


@dataclass(frozen=True)
class SafeSetGrid:
    """Barrier values h = w_safe - W sampled on a rectangular stretch grid.

    h_values has shape (len(theta_axis), len(z_axis)); positive entries are
    in-safe-set grid nodes.
    """

    theta_axis: np.ndarray
    z_axis: np.ndarray
    h_values: np.ndarray


def first_invariant(t: PrincipalTriplet) -> float:
    """Trace of the left Cauchy-Green tensor, sum of squared stretches.

    At least 3 for any incompressible triplet (AM-GM), with equality only
    at the undeformed state.
    """
    return t.lambda_1 * t.lambda_1 + t.lambda_2 * t.lambda_2 + t.lambda_3 * t.lambda_3


def strain_energy(p: MaterialParams, s: StretchPair) -> float:
    """Stored energy density W in J/m^3, radial stretch eliminated."""
    lt, lz = s.lambda_theta, s.lambda_z
    inv = 1.0 / (lt * lt * lz * lz)
    return 0.5 * p.mu * (lt * lt + lz * lz + inv - 3.0)


def strain_energy_gradient(p: MaterialParams, s: StretchPair) -> np.ndarray:
    """dW/d(lambda_theta, lambda_z), Pa. Zero exactly at (1, 1)."""
    lt, lz = s.lambda_theta, s.lambda_z
    inv = 1.0 / (lt * lt * lz * lz)
    return np.array([p.mu * (lt - inv / lt), p.mu * (lz - inv / lz)])


def strain_energy_hessian(p: MaterialParams, s: StretchPair) -> np.ndarray:
    """Second derivatives of W, Pa. Symmetric positive definite on lt, lz > 0."""
    lt, lz = s.lambda_theta, s.lambda_z
    inv = 1.0 / (lt * lt * lz * lz)
    off = 2.0 * p.mu * inv / (lt * lz)
    return np.array(
        [
            [p.mu * (1.0 + 3.0 * inv / (lt * lt)), off],
            [off, p.mu * (1.0 + 3.0 * inv / (lz * lz))],
        ]
    )


def cauchy_stress(p: MaterialParams, t: PrincipalTriplet, axis: int, free_axis: int = 0) -> float:
    """Principal Cauchy stress, Pa.

    The incompressibility pressure is fixed by requiring zero stress on the
    traction-free principal direction `free_axis` (the radial axis for tube
    triplets, index 0 as produced by the tube kinematics; a lateral axis for
    uniaxial triplets). With that multiplier the stress on `axis` is

        sigma_i = mu * (lambda_i^2 - lambda_free^2)
    """
    stretches = t.as_array()
    if axis not in (0, 1, 2) or free_axis not in (0, 1, 2):
        raise ValueError("axis and free_axis must be 0, 1 or 2")
    p_lagrange = p.mu * stretches[free_axis] ** 2
    return p.mu * stretches[axis] ** 2 - p_lagrange


def uniaxial_stress(p: MaterialParams, stretch: float) -> float:
    """Uniaxial-tension Cauchy stress mu * (lambda^2 - 1/lambda), Pa."""
    return p.mu * (stretch * stretch - 1.0 / stretch)


def calibrate_mu_from_safe_energy(w_safe: float, lambda_crit: float) -> float:
    """Shear modulus that stores `w_safe` at uniaxial stretch `lambda_crit`.

    Inverts W_uniaxial(lambda) = mu/2 * (lambda^2 + 2/lambda - 3). The
    denominator vanishes at lambda = 1, so lambda_crit must exceed 1.
    """
    if not math.isfinite(w_safe) or w_safe <= 0.0:
        raise ValueError(f"w_safe must be finite and > 0, got {w_safe!r}")
    if not math.isfinite(lambda_crit) or lambda_crit <= 1.0:
        raise ValueError(f"lambda_crit must be > 1, got {lambda_crit!r}")
    denom = lambda_crit * lambda_crit + 2.0 / lambda_crit - 3.0
    return 2.0 * w_safe / denom


def fit_mu_from_tensile_data(samples) -> float:
    """Least-squares shear modulus from (stretch, stress_pa) tensile samples.

    The uniaxial model sigma = mu * (lambda^2 - 1/lambda) is linear in mu,
    so the fit is closed form: mu = sum(sigma * g) / sum(g^2) with
    g = lambda^2 - 1/lambda. Samples at lambda = 1 carry no information
    (g = 0); data consisting only of such samples is degenerate.
    """
    samples = list(samples)
    if not samples:
        raise CalibrationError("no tensile samples provided")
    stretch = np.array([s[0] for s in samples], dtype=float)
    stress = np.array([s[1] for s in samples], dtype=float)
    if np.any(stretch <= 0.0) or not np.all(np.isfinite(stretch)) or not np.all(np.isfinite(stress)):
        raise CalibrationError("tensile samples must have finite stress and stretch > 0")
    basis = stretch * stretch - 1.0 / stretch
    norm = float(basis @ basis)
    if norm < 1e-30:
        raise CalibrationError("degenerate tensile data: all samples at stretch 1")
    return float(basis @ stress) / norm


def scan_safe_set(
    p: MaterialParams,
    w_safe: float,
    theta_range: tuple[float, float] = (0.5, 2.5),
    z_range: tuple[float, float] = (0.5, 2.5),
    n: int | tuple[int, int] = 201,
) -> SafeSetGrid:
    """Evaluate h = w_safe - W on a uniform stretch grid.

    Positive entries mark the safe set; the h = 0 level set is the barrier.
    """
    if not math.isfinite(w_safe) or w_safe <= 0.0:
        raise ValueError(f"w_safe must be finite and > 0, got {w_safe!r}")
    n_theta, n_z = (n, n) if isinstance(n, int) else n
    if n_theta < 2 or n_z < 2:
        raise ValueError("need at least 2 samples per axis")
    for name, (lo, hi) in (("theta_range", theta_range), ("z_range", z_range)):
        if lo <= 0.0 or hi <= lo:
            raise ValueError(f"{name} must satisfy 0 < lo < hi, got {(lo, hi)!r}")
    theta_axis = np.linspace(theta_range[0], theta_range[1], n_theta)
    z_axis = np.linspace(z_range[0], z_range[1], n_z)
    lt2 = (theta_axis * theta_axis)[:, None]
    lz2 = (z_axis * z_axis)[None, :]
    w = 0.5 * p.mu * (lt2 + lz2 + 1.0 / (lt2 * lz2) - 3.0)
    return SafeSetGrid(theta_axis=theta_axis, z_axis=z_axis, h_values=w_safe - w)
