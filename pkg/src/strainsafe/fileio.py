"""CSV persistence for traces, safe-set grids, tensile and pressure data.

All files use comma separators, LF line endings and shortest round-trip
float formatting (repr), so outputs are locale independent and byte
reproducible for identical inputs.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .material import SafeSetGrid
from .sim import SimulationTrace

TRACE_HEADER = (
    "t,lambda_theta,lambda_z,dlambda_theta,dlambda_z,"
    "u_nom_pa,u_safe_pa,h_j_per_m3,psi1,w_j_per_m3,active"
)
SAFESET_HEADER = "lambda_theta,lambda_z,h_j_per_m3"
TENSILE_HEADER = ("stretch", "stress_pa")
PRESSURE_HEADER = ("t", "pressure_pa")


def _fmt(x: float) -> str:
    return repr(float(x))


def write_trace_csv(trace: SimulationTrace, path: str | Path) -> None:
    cols = trace.columns()
    lines = [TRACE_HEADER]
    for i in range(len(trace)):
        row = [_fmt(col[i]) for col in cols[:-1]]
        row.append(str(int(cols[-1][i])))
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def read_trace_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Trace columns keyed by header name."""
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        names = reader.fieldnames
        if names is None or ",".join(names) != TRACE_HEADER:
            raise ValueError(f"{path}: expected trace header {TRACE_HEADER!r}")
        rows = [[float(row[name]) for name in names] for row in reader]
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(names)))
    return {name: data[:, i] for i, name in enumerate(names)}


def write_safe_set_csv(grid: SafeSetGrid, path: str | Path) -> None:
    """Row-major grid dump: the z index varies fastest."""
    lines = [SAFESET_HEADER]
    for i, lt in enumerate(grid.theta_axis):
        for j, lz in enumerate(grid.z_axis):
            lines.append(f"{_fmt(lt)},{_fmt(lz)},{_fmt(grid.h_values[i, j])}")
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def _read_two_column_csv(path: str | Path, header: tuple[str, str]) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            first = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if tuple(name.strip() for name in first) != header:
            raise ValueError(f"{path}: expected header {','.join(header)!r}, got {','.join(first)!r}")
        a, b = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            a.append(float(row[0]))
            b.append(float(row[1]))
    return np.array(a), np.array(b)


def read_tensile_csv(path: str | Path) -> list[tuple[float, float]]:
    """(stretch, stress_pa) samples for constitutive calibration."""
    stretch, stress = _read_two_column_csv(path, TENSILE_HEADER)
    return list(zip(stretch.tolist(), stress.tolist()))


def read_pressure_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """(t, pressure_pa) samples for open-loop replay."""
    return _read_two_column_csv(path, PRESSURE_HEADER)


def write_pressure_csv(times, pressures, path: str | Path) -> None:
    lines = [",".join(PRESSURE_HEADER)]
    for t, u in zip(times, pressures):
        lines.append(f"{_fmt(t)},{_fmt(u)}")
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")
