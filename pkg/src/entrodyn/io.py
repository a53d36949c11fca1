"""Plain-text formats: payoff matrices, spectra, joints, trajectories, reports.

CSV numbers use Python's shortest round-trip float representation so the
files re-parse to identical doubles and diff cleanly between runs.
"""
from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from .classical import Trajectory
from .game import check_payoff
from .infotheory import check_joint
from .quantum import QuantumTrajectory
from .thermo import check_spectrum


def fmt(v) -> str:
    return repr(float(v))


def fmt12(v) -> str:
    return format(float(v), ".12g")


def atomic_write_text(path, text: str) -> Path:
    """Write ``text`` to a temporary sibling file, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def read_payoff(path) -> np.ndarray:
    """First line ``n``, then ``n`` rows of ``n`` whitespace-separated numbers."""
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty payoff file")
    try:
        n = int(lines[0][0])
        rows = [[float(v) for v in ln] for ln in lines[1:]]
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if len(lines[0]) != 1 or len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"{path}: expected {n} rows of {n} entries after the size line")
    return check_payoff(rows)


def format_payoff(a) -> str:
    a = check_payoff(a)
    rows = [" ".join(fmt(v) for v in row) for row in a]
    return "\n".join([str(a.shape[0])] + rows) + "\n"


def write_payoff(path, a) -> Path:
    return atomic_write_text(path, format_payoff(a))


def read_spectrum(path) -> np.ndarray:
    return check_spectrum([float(ln) for ln in Path(path).read_text().splitlines() if ln.strip()])


def write_spectrum(path, levels) -> Path:
    return atomic_write_text(path, "".join(fmt(v) + "\n" for v in check_spectrum(levels)))


def read_joint(path) -> np.ndarray:
    rows = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    return check_joint([[float(v) for v in ln.split(",")] for ln in rows])


def classical_csv(traj: Trajectory) -> str:
    n = traj.states.shape[1]
    lines = [",".join(["t"] + [f"x_{i + 1}" for i in range(n)] + ["H"])]
    for t, x, h in zip(traj.times, traj.states, traj.entropies):
        lines.append(",".join([fmt(t)] + [fmt(v) for v in x] + [fmt(h)]))
    return "\n".join(lines) + "\n"


def quantum_csv(traj: QuantumTrajectory) -> str:
    n = traj.states.shape[1]
    labels = [f"{i + 1}{j + 1}" if n < 10 else f"{i + 1}_{j + 1}" for i in range(n) for j in range(n)]
    cols = ["t", "S", "dSdt_series", "dSdt_exact"]
    for lab in labels:
        cols += [f"re(rho_{lab})", f"im(rho_{lab})"]
    lines = [
        f"# rho flattened row-major: rho_ij with i the row, j the column, both 1-based; n={n}",
        ",".join(cols),
    ]
    for t, s, rs, rx, rho in zip(traj.times, traj.entropies, traj.rate_series, traj.rate_exact, traj.states):
        vals = [fmt(t), fmt(s), fmt(rs), fmt(rx)]
        for z in rho.ravel():
            vals += [fmt(z.real), fmt(z.imag)]
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


def format_report(values: dict) -> str:
    """``key=value`` lines, floats to 12 significant digits."""
    out = []
    for key, val in values.items():
        if isinstance(val, (bool, np.bool_)) or val is None:
            text = str(val).lower()
        elif isinstance(val, (float, np.floating)):
            text = fmt12(val)
        elif isinstance(val, (list, tuple, np.ndarray)):
            text = " ".join(fmt12(v) for v in np.ravel(val))
        else:
            text = str(val)
        out.append(f"{key}={text}")
    return "\n".join(out) + "\n"
