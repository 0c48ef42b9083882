"""Strain-energy barrier of relative degree two and its QP constraint row.

The barrier h = w_safe - W(stretch) does not see the pressure input until
its second time derivative, so safety is enforced through the chain

    psi0 = h
    psi1 = psi0' + alpha1 * psi0
    psi2 = psi1' + alpha2 * psi1 >= 0

with linear class-K gains. Expanding psi2 with the tube dynamics
substituted gives a constraint affine in the pressure u,

    a * u <= b
    a = gradW^T M^-1 F_ext
    b = -ldot^T hessW ldot + gradW^T M^-1 (F_v + F_e)
        + (alpha1 + alpha2) * hdot + alpha1 * alpha2 * h

which the safety filter consumes. Enforcing psi2 >= 0 makes the
active-constraint h dynamics critically damped with poles at -alpha1 and
-alpha2, so h decays to the boundary without crossing it. (Dropping the
alpha1 * hdot contribution, i.e. enforcing hddot + alpha2 psi1 >= 0
instead, leaves oscillatory boundary dynamics that overshoot into h < 0.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .material import MaterialParams, StretchPair, strain_energy, strain_energy_gradient, strain_energy_hessian
from .tube import StretchState, TubeGeometry, elastic_force, external_force_vector, mass_matrix, viscous_force


@dataclass(frozen=True)
class SafetySpec:
    """Critical energy density w_safe (J/m^3) and class-K gains (1/s)."""

    w_safe: float
    alpha1: float = 2500.0
    alpha2: float = 2500.0

    def __post_init__(self) -> None:
        for name in ("w_safe", "alpha1", "alpha2"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class BarrierEval:
    """One-shot evaluation of the barrier chain at a state.

    a_coeff * u <= b_coeff is the pressure constraint equivalent to
    psi1' + alpha2 * psi1 >= 0 under the tube dynamics.
    """

    h: float
    h_dot: float
    psi1: float
    a_coeff: float
    b_coeff: float


def barrier(spec: SafetySpec, p: MaterialParams, s: StretchPair) -> float:
    """h = w_safe - W; non-negative exactly on the safe set."""
    return spec.w_safe - strain_energy(p, s)


def barrier_rate(spec: SafetySpec, p: MaterialParams, st: StretchState) -> float:
    """First time derivative of the barrier, -gradW . ldot."""
    grad = strain_energy_gradient(p, st.stretch)
    return -(grad[0] * st.rate[0] + grad[1] * st.rate[1])


def psi_sequence(spec: SafetySpec, p: MaterialParams, st: StretchState) -> tuple[float, float]:
    """(psi0, psi1) = (h, hdot + alpha1 * h)."""
    h = barrier(spec, p, st.stretch)
    return h, barrier_rate(spec, p, st) + spec.alpha1 * h


def evaluate(
    spec: SafetySpec, p: MaterialParams, g: TubeGeometry, st: StretchState
) -> BarrierEval:
    """Barrier values and QP constraint row at one state."""
    rate = np.asarray(st.rate)
    grad = strain_energy_gradient(p, st.stretch)
    hess = strain_energy_hessian(p, st.stretch)
    m_diag = np.diag(mass_matrix(g))
    f_back = viscous_force(p, g, st) + elastic_force(p, g, st.stretch)
    f_ext = external_force_vector(g, st.stretch)

    h = barrier(spec, p, st.stretch)
    h_dot = -float(grad @ rate)
    psi1 = h_dot + spec.alpha1 * h

    a = float(grad @ (f_ext / m_diag))
    b = (
        -float(rate @ hess @ rate)
        + float(grad @ (f_back / m_diag))
        + (spec.alpha1 + spec.alpha2) * h_dot
        + spec.alpha1 * spec.alpha2 * h
    )
    return BarrierEval(h=h, h_dot=h_dot, psi1=psi1, a_coeff=a, b_coeff=b)


def constraint_coefficients(
    spec: SafetySpec, p: MaterialParams, g: TubeGeometry, st: StretchState
) -> tuple[float, float]:
    """(a, b) of the half-space a * u <= b enforcing psi2 >= 0."""
    ev = evaluate(spec, p, g, st)
    return ev.a_coeff, ev.b_coeff
