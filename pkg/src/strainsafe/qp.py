"""Minimum-deviation projection onto a single affine constraint.

The safety QP

    min_u  1/2 ||u - u_nom||^2   s.t.  a . u <= b

has a closed-form solution for one constraint: return u_nom if feasible,
otherwise project onto the hyperplane a . u = b. Solving it exactly avoids
coupling trajectory results to iterative-solver tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# |a| below this is treated as a vacuous (or infeasible) constraint.
COEFF_EPS = 1e-14


class InfeasibleConstraintError(RuntimeError):
    """No control can satisfy the safety constraint at this state."""


@dataclass(frozen=True)
class FilterResult:
    """Outcome of one projection.

    slack is b - a . u_safe: non-negative up to rounding, zero when the
    constraint is active.
    """

    u_safe: float | np.ndarray
    u_nominal: float | np.ndarray
    active: bool
    slack: float


def filter_scalar(
    u_nom: float,
    a: float,
    b: float,
    u_min: float | None = None,
    u_max: float | None = None,
) -> FilterResult:
    """Project a scalar pressure onto {u : a*u <= b} (optionally boxed).

    With box bounds the feasible set is an interval; the projection is a
    clamp. An empty feasible set raises InfeasibleConstraintError. Note the
    forward-invariance guarantee assumes the constraint stays feasible, so
    bounds tight enough to clip the safety action void it.
    """
    if not (math.isfinite(u_nom) and math.isfinite(a) and math.isfinite(b)):
        raise ValueError("u_nom, a, b must all be finite")

    lo = -math.inf if u_min is None else u_min
    hi = math.inf if u_max is None else u_max
    if lo > hi:
        raise ValueError(f"empty pressure box [{lo}, {hi}]")

    if abs(a) < COEFF_EPS:
        if b < 0.0:
            raise InfeasibleConstraintError(
                f"constraint {a} * u <= {b} cannot be satisfied by any pressure"
            )
        u = min(max(u_nom, lo), hi)
        return FilterResult(u_safe=u, u_nominal=u_nom, active=u != u_nom, slack=b - a * u)

    if a > 0.0:
        hi = min(hi, b / a)
    else:
        lo = max(lo, b / a)
    if lo > hi:
        raise InfeasibleConstraintError(
            f"pressure box [{u_min}, {u_max}] excludes the safe half-space a*u <= b "
            f"(a={a}, b={b})"
        )
    u = min(max(u_nom, lo), hi)
    return FilterResult(u_safe=u, u_nominal=u_nom, active=u != u_nom, slack=b - a * u)


def filter_general(u_nom, a, b: float) -> FilterResult:
    """Project a q-dimensional control onto {u : a . u <= b}.

    Closed form single-half-space projection:
    u = u_nom - (a . u_nom - b) / ||a||^2 * a when the constraint is
    violated. Reduces to :func:`filter_scalar` for q = 1.
    """
    u_nom = np.asarray(u_nom, dtype=float)
    a = np.asarray(a, dtype=float)
    if u_nom.shape != a.shape or u_nom.ndim != 1:
        raise ValueError("u_nom and a must be 1-d arrays of equal length")
    if not (np.all(np.isfinite(u_nom)) and np.all(np.isfinite(a)) and math.isfinite(b)):
        raise ValueError("u_nom, a, b must all be finite")

    norm_sq = float(a @ a)
    residual = float(a @ u_nom) - b
    if norm_sq < COEFF_EPS * COEFF_EPS:
        if b < 0.0:
            raise InfeasibleConstraintError("zero constraint row with negative bound")
        return FilterResult(u_safe=u_nom.copy(), u_nominal=u_nom, active=False, slack=b)
    if residual <= 0.0:
        return FilterResult(u_safe=u_nom.copy(), u_nominal=u_nom, active=False, slack=-residual)
    u = u_nom - (residual / norm_sq) * a
    return FilterResult(u_safe=u, u_nominal=u_nom, active=True, slack=b - float(a @ u))
