"""Fixed-step RK4 simulation of the filtered tube dynamics.

Per macro step the loop evaluates the nominal pressure, forms the barrier
constraint at the current state, projects the nominal through the safety
filter, holds the result over the step (zero-order hold) and advances with
classical RK4. While the constraint is active the held value is tightened
so the constraint also holds at the RK4-predicted end of the step;
otherwise the zero-order hold parks the trajectory a hair outside the
barrier (the constraint row drifts over the step while u stays frozen).

Faults (state leaving the validity guard, infeasible constraint) raise
:class:`SimulationFault` with the partial trace attached for diagnosis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .barrier import SafetySpec, evaluate
from .material import MaterialParams, StretchPair, strain_energy, strain_energy_gradient, strain_energy_hessian
from .qp import COEFF_EPS, InfeasibleConstraintError, filter_scalar
from .tube import StretchState, TubeGeometry, elastic_force, external_force_vector, make_rhs, mass_matrix, state_is_valid


class SimulationFault(RuntimeError):
    """Integration or feasibility fault; carries the partial trace."""

    def __init__(self, reason: str, time: float | None = None, trace: "SimulationTrace | None" = None):
        stamp = "" if time is None else f" at t={time:.6g} s"
        super().__init__(f"{reason}{stamp}")
        self.reason = reason
        self.time = time
        self.trace = trace


@dataclass(frozen=True)
class NominalControlSpec:
    """Nominal pressure command, Pa.

    half_sinusoid: amplitude * sin(2 pi frequency t) for t < cutoff, 0 after
    constant:      amplitude for all t
    replay:        linear interpolation of replay_samples (t, Pa) pairs
    """

    kind: str = "half_sinusoid"
    amplitude: float = 10_000.0
    frequency: float = 1.0
    cutoff: float = 0.5
    replay_samples: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("half_sinusoid", "constant", "replay"):
            raise ValueError(f"unknown nominal control kind {self.kind!r}")
        if self.kind == "replay":
            if not self.replay_samples:
                raise ValueError("replay nominal requires replay_samples")
            times = [t for t, _ in self.replay_samples]
            if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
                raise ValueError("replay sample times must be strictly increasing")

    def evaluate(self, t: float) -> float:
        if self.kind == "half_sinusoid":
            if t < self.cutoff:
                return self.amplitude * math.sin(2.0 * math.pi * self.frequency * t)
            return 0.0
        if self.kind == "constant":
            return self.amplitude
        times = np.array([s[0] for s in self.replay_samples])
        values = np.array([s[1] for s in self.replay_samples])
        return float(np.interp(t, times, values))


@dataclass(frozen=True)
class SimulationConfig:
    """Run setup: horizon, step, initial state, nominal command, filter flag.

    log_stride decimates the trace (1 keeps every step). t_end must be an
    integer number of steps and the final step must land on the stride.
    """

    t_end: float = 1.0
    dt: float = 1e-4
    initial_state: StretchState = field(default_factory=StretchState.rest)
    nominal: NominalControlSpec = field(default_factory=NominalControlSpec)
    filter_enabled: bool = True
    log_stride: int = 1
    pressure_bounds: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if not (0.0 < self.dt < self.t_end):
            raise ValueError(f"need 0 < dt < t_end, got dt={self.dt!r}, t_end={self.t_end!r}")
        n = round(self.t_end / self.dt)
        if n < 1 or abs(n * self.dt - self.t_end) > 1e-9 * max(1.0, self.t_end):
            raise ValueError("t_end must be an integer multiple of dt")
        if self.log_stride < 1 or n % self.log_stride != 0:
            raise ValueError("log_stride must be >= 1 and divide the step count")
        if self.pressure_bounds is not None:
            lo, hi = self.pressure_bounds
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"invalid pressure_bounds {self.pressure_bounds!r}")

    @property
    def n_steps(self) -> int:
        return round(self.t_end / self.dt)


@dataclass(frozen=True)
class SimulationTrace:
    """Column-oriented closed-loop trace, one row per logged step."""

    t: np.ndarray
    lambda_theta: np.ndarray
    lambda_z: np.ndarray
    dlambda_theta: np.ndarray
    dlambda_z: np.ndarray
    u_nom: np.ndarray
    u_safe: np.ndarray
    h: np.ndarray
    psi1: np.ndarray
    w: np.ndarray
    active: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    COLUMNS = (
        "t",
        "lambda_theta",
        "lambda_z",
        "dlambda_theta",
        "dlambda_z",
        "u_nom_pa",
        "u_safe_pa",
        "h_j_per_m3",
        "psi1",
        "w_j_per_m3",
        "active",
    )

    def columns(self) -> tuple[np.ndarray, ...]:
        return (
            self.t,
            self.lambda_theta,
            self.lambda_z,
            self.dlambda_theta,
            self.dlambda_z,
            self.u_nom,
            self.u_safe,
            self.h,
            self.psi1,
            self.w,
            self.active,
        )


def rk4_step(
    p: MaterialParams, g: TubeGeometry, state: StretchState, u: float, dt: float
) -> StretchState:
    """One classical RK4 step with the pressure held constant.

    Raises SimulationFault if the updated state leaves the validity guard
    (non-finite or stretch below the representable floor).
    """
    rhs = make_rhs(p, g)
    lt, lz, rt, rz = state.as_array()
    k1 = rhs(lt, lz, rt, rz, u)
    k2 = rhs(lt + 0.5 * dt * k1[0], lz + 0.5 * dt * k1[1], rt + 0.5 * dt * k1[2], rz + 0.5 * dt * k1[3], u)
    k3 = rhs(lt + 0.5 * dt * k2[0], lz + 0.5 * dt * k2[1], rt + 0.5 * dt * k2[2], rz + 0.5 * dt * k2[3], u)
    k4 = rhs(lt + dt * k3[0], lz + dt * k3[1], rt + dt * k3[2], rz + dt * k3[3], u)
    lt += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    lz += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    rt += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    rz += dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
    if not state_is_valid(lt, lz, rt, rz):
        raise SimulationFault("state left the validity guard during an RK4 step")
    return StretchState(StretchPair(lt, lz), (rt, rz))


def _make_coeff_eval(spec: SafetySpec, p: MaterialParams, g: TubeGeometry):
    """Scalar-arithmetic twin of barrier.evaluate for the hot loop.

    Returns f(lt, lz, rt, rz) -> (a, b, h, psi1, w). Matches
    :func:`strainsafe.barrier.evaluate` to machine precision (tested).
    """
    mm = mass_matrix(g)
    m_theta, m_z = float(mm[0, 0]), float(mm[1, 1])
    mu = p.mu
    mu_a1 = mu * g.hoop_area
    mu_a2 = mu * g.axial_area
    eta_a1 = p.eta * g.hoop_area
    eta_a2 = p.eta * g.axial_area
    p_hoop = 2.0 * math.pi * g.r_inner * g.z_eff
    p_axial = math.pi * g.r_inner * g.r_inner
    w_safe, a1, a2 = spec.w_safe, spec.alpha1, spec.alpha2

    def coeffs(lt: float, lz: float, rt: float, rz: float):
        inv = 1.0 / (lt * lt * lz * lz)
        w = 0.5 * mu * (lt * lt + lz * lz + inv - 3.0)
        g1 = mu * (lt - inv / lt)
        g2 = mu * (lz - inv / lz)
        h11 = mu * (1.0 + 3.0 * inv / (lt * lt))
        h12 = 2.0 * mu * inv / (lt * lz)
        h22 = mu * (1.0 + 3.0 * inv / (lz * lz))
        f1 = eta_a1 * rt + mu_a1 * (lt * lt - inv)
        f2 = eta_a2 * rz + mu_a2 * (lz * lz - inv)
        h = w_safe - w
        h_dot = -(g1 * rt + g2 * rz)
        a = (g1 * p_hoop * lt * lz) / m_theta + (g2 * p_axial * lt * lt) / m_z
        b = (
            -(rt * rt * h11 + 2.0 * rt * rz * h12 + rz * rz * h22)
            + g1 * f1 / m_theta
            + g2 * f2 / m_z
            + (a1 + a2) * h_dot
            + a1 * a2 * h
        )
        return a, b, h, h_dot + a1 * h, w

    return coeffs


def _rk4_raw(rhs, lt, lz, rt, rz, u, dt):
    k1 = rhs(lt, lz, rt, rz, u)
    k2 = rhs(lt + 0.5 * dt * k1[0], lz + 0.5 * dt * k1[1], rt + 0.5 * dt * k1[2], rz + 0.5 * dt * k1[3], u)
    k3 = rhs(lt + 0.5 * dt * k2[0], lz + 0.5 * dt * k2[1], rt + 0.5 * dt * k2[2], rz + 0.5 * dt * k2[3], u)
    k4 = rhs(lt + dt * k3[0], lz + dt * k3[1], rt + dt * k3[2], rz + dt * k3[3], u)
    return (
        lt + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        lz + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        rt + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        rz + dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    )


def _run_loop(cfg, spec, p, g, pressure_of_step):
    """Shared closed-loop/open-loop driver.

    pressure_of_step(k, t, coeff_tuple) -> (u_nom, u_safe, active) decides
    the held pressure for step k; the loop logs, guards and integrates.
    """
    rhs = make_rhs(p, g)
    coeffs = _make_coeff_eval(spec, p, g)
    n = cfg.n_steps
    stride = cfg.log_stride
    dt = cfg.dt

    init = cfg.initial_state.as_array()
    lt, lz, rt, rz = (float(v) for v in init)

    rows: list[tuple] = []
    fault: tuple[str, float] | None = None

    for k in range(n + 1):
        t = k * dt
        c = coeffs(lt, lz, rt, rz)
        try:
            u_nom, u_safe, active = pressure_of_step(k, t, c, (lt, lz, rt, rz))
        except InfeasibleConstraintError as exc:
            if k % stride == 0:
                rows.append((t, lt, lz, rt, rz, math.nan, math.nan, c[2], c[3], c[4], 1))
            fault = (f"infeasible safety constraint: {exc}", t)
            break
        if k % stride == 0:
            rows.append((t, lt, lz, rt, rz, u_nom, u_safe, c[2], c[3], c[4], int(active)))
        if k == n:
            break
        lt, lz, rt, rz = _rk4_raw(rhs, lt, lz, rt, rz, u_safe, dt)
        if not state_is_valid(lt, lz, rt, rz):
            fault = ("state left the validity guard", t + dt)
            break

    data = np.array(rows, dtype=float) if rows else np.empty((0, 11))
    trace = SimulationTrace(
        t=data[:, 0],
        lambda_theta=data[:, 1],
        lambda_z=data[:, 2],
        dlambda_theta=data[:, 3],
        dlambda_z=data[:, 4],
        u_nom=data[:, 5],
        u_safe=data[:, 6],
        h=data[:, 7],
        psi1=data[:, 8],
        w=data[:, 9],
        active=data[:, 10].astype(int),
    )
    if fault is not None:
        raise SimulationFault(fault[0], time=fault[1], trace=trace)
    return trace


def simulate(
    cfg: SimulationConfig,
    spec: SafetySpec,
    p: MaterialParams,
    g: TubeGeometry,
) -> SimulationTrace:
    """Closed-loop run: nominal -> safety filter -> dynamics.

    The filter solves the pointwise QP at the current state. When the
    constraint is active, the held pressure additionally satisfies the
    constraint re-evaluated at the RK4-predicted end of the step (one
    predictor pass), which removes the zero-order-hold bias that otherwise
    lets the trace ride marginally outside the barrier.
    """
    rhs = make_rhs(p, g)
    coeffs = _make_coeff_eval(spec, p, g)
    dt = cfg.dt
    bounds = cfg.pressure_bounds
    lo = None if bounds is None else bounds[0]
    hi = None if bounds is None else bounds[1]

    def pressure_of_step(k, t, c, state):
        u_nom = cfg.nominal.evaluate(t)
        if not cfg.filter_enabled:
            return u_nom, u_nom, False
        a, b = c[0], c[1]
        res = filter_scalar(u_nom, a, b, u_min=lo, u_max=hi)
        u = float(res.u_safe)
        active = res.active
        if active and k < cfg.n_steps and a > COEFF_EPS:
            pred = _rk4_raw(rhs, *state, u, dt)
            if state_is_valid(*pred):
                a1, b1 = coeffs(*pred)[:2]
                if a1 > COEFF_EPS:
                    u_end = b1 / a1
                    if u_end < u:
                        u = u_end if lo is None else max(u_end, lo)
        return u_nom, u, active

    return _run_loop(cfg, spec, p, g, pressure_of_step)


def replay(
    cfg: SimulationConfig,
    spec: SafetySpec,
    p: MaterialParams,
    g: TubeGeometry,
    times,
    pressures,
    interpolation: str = "hold",
) -> SimulationTrace:
    """Open-loop run driving the dynamics with a recorded pressure history.

    interpolation "hold" keeps the most recent sample (exactly inverts a
    trace exported by :func:`simulate`, which applies zero-order-hold
    pressure); "linear" interpolates between samples, the better
    reconstruction for externally logged smooth signals. The samples must
    cover [0, t_end]; the filter columns are logged as inactive.
    """
    times = np.asarray(times, dtype=float)
    pressures = np.asarray(pressures, dtype=float)
    if times.ndim != 1 or times.shape != pressures.shape or len(times) == 0:
        raise ValueError("times and pressures must be equal-length 1-d arrays")
    if np.any(np.diff(times) <= 0.0):
        raise ValueError("replay sample times must be strictly increasing")
    if interpolation not in ("hold", "linear"):
        raise ValueError(f"unknown interpolation {interpolation!r}")
    if times[0] > 0.0 or times[-1] < cfg.t_end - 1e-12:
        raise ValueError(
            f"replay samples cover [{times[0]:g}, {times[-1]:g}] s "
            f"but the run needs [0, {cfg.t_end:g}] s"
        )

    def pressure_at(t: float) -> float:
        if interpolation == "linear":
            return float(np.interp(t, times, pressures))
        idx = int(np.searchsorted(times, t, side="right")) - 1
        return float(pressures[max(idx, 0)])

    def pressure_of_step(k, t, c, state):
        u = pressure_at(t)
        return u, u, False

    return _run_loop(cfg, spec, p, g, pressure_of_step)
