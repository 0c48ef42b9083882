"""Run configuration: a single nested JSON document with a schema version.

Defaults reproduce the desk-scale tube scenario: Ecoflex-family wall
(mu = 7900 Pa back-derived from the 7.9 kJ/m^3 critical energy at uniaxial
stretch 2; eta and density are not published for this actuator and are
package defaults), 10.21/14.43 mm radii, 90 mm effective length, 10 kPa
half-sinusoid nominal over 1 s at dt = 1e-4 s.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .barrier import SafetySpec
from .material import MaterialParams, StretchPair
from .sim import NominalControlSpec, SimulationConfig
from .tube import StretchState, TubeGeometry

SCHEMA_VERSION = 1

DEFAULT_MU = 7900.0
DEFAULT_ETA = 3200.0
DEFAULT_DENSITY = 1070.0


class ConfigError(ValueError):
    """Configuration problem, annotated with the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class SafeSetSpec:
    """Grid extents and resolution for the safe-set scan."""

    theta_min: float = 0.5
    theta_max: float = 2.5
    z_min: float = 0.5
    z_max: float = 2.5
    n_theta: int = 201
    n_z: int = 201


@dataclass(frozen=True)
class OutputSpec:
    """Where results land and how densely the trace is written."""

    directory: str = "out"
    decimate: int = 1
    plots: bool = False


@dataclass(frozen=True)
class RunConfig:
    material: MaterialParams = field(default_factory=lambda: MaterialParams(DEFAULT_MU, DEFAULT_ETA))
    geometry: TubeGeometry = field(default_factory=lambda: TubeGeometry(0.01021, 0.01443, 0.090, 0.020, DEFAULT_DENSITY))
    safety: SafetySpec = field(default_factory=lambda: SafetySpec(7900.0, 2500.0, 2500.0))
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    safe_set: SafeSetSpec = field(default_factory=SafeSetSpec)
    output: OutputSpec = field(default_factory=OutputSpec)


def default_config() -> RunConfig:
    return RunConfig()


_REQUIRED = object()


def _get(mapping: dict, path: str, key: str, expected, default=_REQUIRED):
    full = f"{path}.{key}" if path else key
    if key not in mapping:
        if default is _REQUIRED:
            raise ConfigError(full, "missing required field")
        return default
    value = mapping[key]
    if expected is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(full, f"expected a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(full, "must be finite")
        return value
    if expected is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(full, f"expected an integer, got {value!r}")
        return value
    if expected is bool:
        if not isinstance(value, bool):
            raise ConfigError(full, f"expected true/false, got {value!r}")
        return value
    if expected is str:
        if not isinstance(value, str):
            raise ConfigError(full, f"expected a string, got {value!r}")
        return value
    if expected is dict:
        if not isinstance(value, dict):
            raise ConfigError(full, f"expected an object, got {value!r}")
        return value
    if expected is list:
        if not isinstance(value, list):
            raise ConfigError(full, f"expected a list, got {value!r}")
        return value
    raise AssertionError(f"unhandled expected type {expected}")


def _build(path: str, ctor, **kwargs):
    try:
        return ctor(**kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def parse_config(doc: dict) -> RunConfig:
    """Validate a parsed JSON document into a RunConfig.

    Raises ConfigError naming the field path of the first violation.
    """
    if not isinstance(doc, dict):
        raise ConfigError("", "top-level config must be an object")
    version = _get(doc, "", "schema_version", int)
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {version} (expected {SCHEMA_VERSION})")

    mat = _get(doc, "", "material", dict, {})
    material = _build(
        "material",
        MaterialParams,
        mu=_get(mat, "material", "mu_pa", float, DEFAULT_MU),
        eta=_get(mat, "material", "eta_pa_s", float, DEFAULT_ETA),
    )

    geo = _get(doc, "", "geometry", dict, {})
    geometry = _build(
        "geometry",
        TubeGeometry,
        r_inner=_get(geo, "geometry", "r_inner_m", float, 0.01021),
        r_outer=_get(geo, "geometry", "r_outer_m", float, 0.01443),
        z_eff=_get(geo, "geometry", "z_eff_m", float, 0.090),
        cap_height=_get(geo, "geometry", "cap_height_m", float, 0.020),
        density=_get(geo, "geometry", "density_kg_m3", float, DEFAULT_DENSITY),
    )

    saf = _get(doc, "", "safety", dict, {})
    safety = _build(
        "safety",
        SafetySpec,
        w_safe=_get(saf, "safety", "w_safe_j_per_m3", float, 7900.0),
        alpha1=_get(saf, "safety", "alpha1_per_s", float, 2500.0),
        alpha2=_get(saf, "safety", "alpha2_per_s", float, 2500.0),
    )

    simd = _get(doc, "", "simulation", dict, {})
    nom = _get(simd, "simulation", "nominal", dict, {})
    kind = _get(nom, "simulation.nominal", "kind", str, "half_sinusoid")
    samples = _get(nom, "simulation.nominal", "replay_samples", list, None)
    if samples is not None:
        try:
            samples = tuple((float(t), float(u)) for t, u in samples)
        except (TypeError, ValueError) as exc:
            raise ConfigError("simulation.nominal.replay_samples", f"expected [t, pa] pairs: {exc}") from exc
    nominal = _build(
        "simulation.nominal",
        NominalControlSpec,
        kind=kind,
        amplitude=_get(nom, "simulation.nominal", "amplitude_pa", float, 10_000.0),
        frequency=_get(nom, "simulation.nominal", "frequency_hz", float, 1.0),
        cutoff=_get(nom, "simulation.nominal", "cutoff_s", float, 0.5),
        replay_samples=samples,
    )

    init = _get(simd, "simulation", "initial_state", list, [1.0, 1.0, 0.0, 0.0])
    if len(init) != 4 or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in init):
        raise ConfigError("simulation.initial_state", f"expected 4 numbers, got {init!r}")
    try:
        initial_state = StretchState(StretchPair(float(init[0]), float(init[1])), (float(init[2]), float(init[3])))
    except ValueError as exc:
        raise ConfigError("simulation.initial_state", str(exc)) from exc

    bounds = _get(simd, "simulation", "pressure_bounds_pa", list, None)
    if bounds is not None:
        if len(bounds) != 2 or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in bounds):
            raise ConfigError("simulation.pressure_bounds_pa", f"expected [lo, hi], got {bounds!r}")
        bounds = (float(bounds[0]), float(bounds[1]))

    dt = _get(simd, "simulation", "dt_s", float, 1e-4)
    t_end = _get(simd, "simulation", "t_end_s", float, 1.0)
    if not 0.0 < dt < t_end:
        raise ConfigError("simulation.dt_s", f"need 0 < dt < t_end, got dt={dt!r}, t_end={t_end!r}")
    simulation = _build(
        "simulation",
        SimulationConfig,
        t_end=t_end,
        dt=dt,
        initial_state=initial_state,
        nominal=nominal,
        filter_enabled=_get(simd, "simulation", "filter_enabled", bool, True),
        log_stride=_get(simd, "simulation", "log_stride", int, 1),
        pressure_bounds=bounds,
    )

    ss = _get(doc, "", "safe_set", dict, {})
    safe_set = SafeSetSpec(
        theta_min=_get(ss, "safe_set", "lambda_theta_min", float, 0.5),
        theta_max=_get(ss, "safe_set", "lambda_theta_max", float, 2.5),
        z_min=_get(ss, "safe_set", "lambda_z_min", float, 0.5),
        z_max=_get(ss, "safe_set", "lambda_z_max", float, 2.5),
        n_theta=_get(ss, "safe_set", "n_lambda_theta", int, 201),
        n_z=_get(ss, "safe_set", "n_lambda_z", int, 201),
    )
    if safe_set.theta_min <= 0 or safe_set.theta_min >= safe_set.theta_max:
        raise ConfigError("safe_set.lambda_theta_min", "need 0 < min < max")
    if safe_set.z_min <= 0 or safe_set.z_min >= safe_set.z_max:
        raise ConfigError("safe_set.lambda_z_min", "need 0 < min < max")
    if safe_set.n_theta < 2 or safe_set.n_z < 2:
        raise ConfigError("safe_set.n_lambda_theta", "need at least 2 samples per axis")

    out = _get(doc, "", "output", dict, {})
    output = OutputSpec(
        directory=_get(out, "output", "directory", str, "out"),
        decimate=_get(out, "output", "decimate", int, 1),
        plots=_get(out, "output", "plots", bool, False),
    )
    if output.decimate < 1:
        raise ConfigError("output.decimate", "must be >= 1")

    return RunConfig(
        material=material,
        geometry=geometry,
        safety=safety,
        simulation=simulation,
        safe_set=safe_set,
        output=output,
    )


def serialize_config(cfg: RunConfig) -> dict:
    """RunConfig back to the JSON document form; inverse of parse_config."""
    sim = cfg.simulation
    nom = sim.nominal
    doc = {
        "schema_version": SCHEMA_VERSION,
        "material": {"mu_pa": cfg.material.mu, "eta_pa_s": cfg.material.eta},
        "geometry": {
            "r_inner_m": cfg.geometry.r_inner,
            "r_outer_m": cfg.geometry.r_outer,
            "z_eff_m": cfg.geometry.z_eff,
            "cap_height_m": cfg.geometry.cap_height,
            "density_kg_m3": cfg.geometry.density,
        },
        "safety": {
            "w_safe_j_per_m3": cfg.safety.w_safe,
            "alpha1_per_s": cfg.safety.alpha1,
            "alpha2_per_s": cfg.safety.alpha2,
        },
        "simulation": {
            "t_end_s": sim.t_end,
            "dt_s": sim.dt,
            "initial_state": list(sim.initial_state.as_array()),
            "filter_enabled": sim.filter_enabled,
            "log_stride": sim.log_stride,
            "pressure_bounds_pa": None if sim.pressure_bounds is None else list(sim.pressure_bounds),
            "nominal": {
                "kind": nom.kind,
                "amplitude_pa": nom.amplitude,
                "frequency_hz": nom.frequency,
                "cutoff_s": nom.cutoff,
                "replay_samples": None if nom.replay_samples is None else [list(s) for s in nom.replay_samples],
            },
        },
        "safe_set": {
            "lambda_theta_min": cfg.safe_set.theta_min,
            "lambda_theta_max": cfg.safe_set.theta_max,
            "lambda_z_min": cfg.safe_set.z_min,
            "lambda_z_max": cfg.safe_set.z_max,
            "n_lambda_theta": cfg.safe_set.n_theta,
            "n_lambda_z": cfg.safe_set.n_z,
        },
        "output": {
            "directory": cfg.output.directory,
            "decimate": cfg.output.decimate,
            "plots": cfg.output.plots,
        },
    }
    return doc


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(str(path), "config file not found")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
    return parse_config(doc)


def save_config(cfg: RunConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(serialize_config(cfg), indent=2) + "\n")
