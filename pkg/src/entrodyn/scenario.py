"""Strict JSON scenario files.

A scenario is a JSON object. ``kind`` selects the pipeline and decides which
other keys are required; unknown keys are errors, so a misspelled parameter
can never be silently ignored.

Common keys
    kind            "classical" | "quantum" | "infotheory" | "thermo"  (required)
    name            run name, default: scenario file stem
    outputs         output directory, default "runs" (``ENTRODYN_OUT`` wins)
    entropy_base    "nats" | "bits", default bits for infotheory, nats otherwise
    seed            integer in [0, 2**64), default 0

classical
    game (required)     payoff file path or inline square matrix
    initial (required)  strategy distribution
    t_end, dt (required), nash_tol (default 1e-9)

quantum
    initial (required)  distribution, or {"rho_real": [[...]], "rho_imag": [[...]]}
    t_end, dt (required)
    game                Hamiltonian i*hbar*Lambda(A, x0); zero Hamiltonian if absent
    mode                "coherent" | "diagonal" quantization, default "coherent"
    gamma (default 0), hbar (default 1)

infotheory
    joint               CSV path or inline matrix to report measures for
    instances           random instances per inequality, default 200

thermo
    spectrum (required) one-level-per-line file path or inline list
    beta | target_mean_energy  exactly one is required
    trials              maxent sampling trials, default 1000
    scan                [beta_min, beta_max, points], default [-5, 5, 101]
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .game import check_distribution, check_payoff
from .infotheory import check_joint
from .io import read_joint, read_payoff, read_spectrum
from .quantum import check_density, quantize
from .thermo import check_spectrum

KINDS = ("classical", "quantum", "infotheory", "thermo")

COMMON = {"kind", "name", "outputs", "entropy_base", "seed"}
ALLOWED = {
    "classical": COMMON | {"game", "initial", "t_end", "dt", "nash_tol"},
    "quantum": COMMON | {"game", "initial", "t_end", "dt", "mode", "gamma", "hbar"},
    "infotheory": COMMON | {"joint", "instances"},
    "thermo": COMMON | {"spectrum", "beta", "target_mean_energy", "trials", "scan"},
}
REQUIRED = {
    "classical": {"game", "initial", "t_end", "dt"},
    "quantum": {"initial", "t_end", "dt"},
    "infotheory": set(),
    "thermo": {"spectrum"},
}


class ScenarioError(ValueError):
    """Invalid scenario; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass
class Scenario:
    kind: str
    name: str
    base_dir: Path
    outputs: str = "runs"
    entropy_base: str | None = None
    seed: int = 0
    game: Any = None
    initial: Any = None
    t_end: float | None = None
    dt: float | None = None
    nash_tol: float = 1e-9
    mode: str = "coherent"
    gamma: float = 0.0
    hbar: float = 1.0
    joint: Any = None
    instances: int = 200
    spectrum: Any = None
    beta: float | None = None
    target_mean_energy: float | None = None
    trials: int = 1000
    scan: list = field(default_factory=lambda: [-5.0, 5.0, 101])

    @property
    def base(self) -> str:
        """Entropy base in effect: bits for information measures, nats otherwise."""
        if self.entropy_base:
            return self.entropy_base
        return "bits" if self.kind == "infotheory" else "nats"

    def resolve(self, ref) -> Path:
        p = Path(ref)
        return p if p.is_absolute() else self.base_dir / p

    def echo(self) -> dict:
        d = asdict(self)
        d["entropy_base"] = self.base
        return {k: v for k, v in d.items() if k in ALLOWED[self.kind] and v is not None}


def _number(d, key, *, positive=False, nonneg=False):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ScenarioError(key, f"expected a finite number, got {v!r}")
    if positive and not v > 0:
        raise ScenarioError(key, f"must be > 0, got {v!r}")
    if nonneg and v < 0:
        raise ScenarioError(key, f"must be >= 0, got {v!r}")
    return float(v)


def _integer(d, key, lo, hi=None):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioError(key, f"expected an integer, got {v!r}")
    if v < lo or (hi is not None and v >= hi):
        raise ScenarioError(key, f"out of range [{lo}, {hi if hi is not None else 'inf'}), got {v!r}")
    return v


def _choice(d, key, options):
    v = d[key]
    if v not in options:
        raise ScenarioError(key, f"expected one of {list(options)}, got {v!r}")
    return v


def _string(d, key):
    v = d[key]
    if not isinstance(v, str) or not v:
        raise ScenarioError(key, f"expected a non-empty string, got {v!r}")
    return v


def _vector(v, key):
    if not isinstance(v, list) or not v or any(isinstance(e, bool) or not isinstance(e, (int, float)) for e in v):
        raise ScenarioError(key, "expected a non-empty list of numbers")
    return [float(e) for e in v]


def _matrix(v, key, square=False):
    if not isinstance(v, list) or not v:
        raise ScenarioError(key, "expected a non-empty list of rows")
    rows = [_vector(r, key) for r in v]
    if len({len(r) for r in rows}) != 1:
        raise ScenarioError(key, "rows have unequal lengths")
    if square and len(rows) != len(rows[0]):
        raise ScenarioError(key, "matrix must be square")
    return rows


def _distribution(v, key):
    x = np.array(_vector(v, key))
    if np.any(x < 0) or abs(x.sum() - 1.0) > 1e-9:
        raise ScenarioError(key, "expected a probability vector (non-negative, summing to 1)")
    return x.tolist()


def _file_or_inline(d, key, base_dir, inline):
    v = d[key]
    if isinstance(v, str):
        p = Path(v) if Path(v).is_absolute() else base_dir / v
        if not p.is_file():
            raise ScenarioError(key, f"file not found: {p}")
        return v
    return inline(v, key)


def validate(raw: dict, base_dir: Path, default_name: str = "scenario") -> Scenario:
    """Check a decoded scenario object and build a :class:`Scenario`."""
    if not isinstance(raw, dict):
        raise ScenarioError("<root>", "scenario must be a JSON object")
    if "kind" not in raw:
        raise ScenarioError("kind", "missing required field")
    kind = _choice(raw, "kind", KINDS)
    unknown = sorted(set(raw) - ALLOWED[kind])
    if unknown:
        raise ScenarioError(unknown[0], f"unknown field for kind {kind!r}")
    missing = sorted(REQUIRED[kind] - set(raw))
    if missing:
        raise ScenarioError(missing[0], "missing required field")

    s = Scenario(kind=kind, name=default_name, base_dir=base_dir)
    if "name" in raw:
        s.name = _string(raw, "name")
    if "outputs" in raw:
        s.outputs = _string(raw, "outputs")
    if "entropy_base" in raw:
        s.entropy_base = _choice(raw, "entropy_base", ("nats", "bits"))
    if "seed" in raw:
        s.seed = _integer(raw, "seed", 0, 2**64)

    if kind in ("classical", "quantum"):
        s.t_end = _number(raw, "t_end", positive=True)
        s.dt = _number(raw, "dt", positive=True)
        if s.dt > s.t_end:
            raise ScenarioError("dt", f"must not exceed t_end ({s.dt!r} > {s.t_end!r})")
        if "game" in raw:
            s.game = _file_or_inline(raw, "game", base_dir, lambda v, k: _matrix(v, k, square=True))

    if kind == "classical":
        s.initial = _distribution(raw["initial"], "initial")
        if "nash_tol" in raw:
            s.nash_tol = _number(raw, "nash_tol", positive=True)
    elif kind == "quantum":
        init = raw["initial"]
        if isinstance(init, dict):
            extra = sorted(set(init) - {"rho_real", "rho_imag"})
            if extra or "rho_real" not in init:
                raise ScenarioError("initial", "density matrix needs 'rho_real' and optional 'rho_imag' only")
            re_part = _matrix(init["rho_real"], "initial", square=True)
            im_part = _matrix(init.get("rho_imag", [[0.0] * len(re_part)] * len(re_part)), "initial", square=True)
            if len(im_part) != len(re_part):
                raise ScenarioError("initial", "rho_real and rho_imag shapes differ")
            s.initial = {"rho_real": re_part, "rho_imag": im_part}
        else:
            s.initial = _distribution(init, "initial")
        if "mode" in raw:
            s.mode = _choice(raw, "mode", ("coherent", "diagonal"))
        if "gamma" in raw:
            s.gamma = _number(raw, "gamma", nonneg=True)
        if "hbar" in raw:
            s.hbar = _number(raw, "hbar", positive=True)
    elif kind == "infotheory":
        if "joint" in raw:
            s.joint = _file_or_inline(raw, "joint", base_dir, _matrix)
        if "instances" in raw:
            s.instances = _integer(raw, "instances", 1)
    elif kind == "thermo":
        s.spectrum = _file_or_inline(raw, "spectrum", base_dir, _vector)
        has_beta, has_target = "beta" in raw, "target_mean_energy" in raw
        if has_beta == has_target:
            raise ScenarioError("beta", "exactly one of 'beta' or 'target_mean_energy' is required")
        if has_beta:
            s.beta = _number(raw, "beta")
        else:
            s.target_mean_energy = _number(raw, "target_mean_energy")
        if "trials" in raw:
            s.trials = _integer(raw, "trials", 1)
        if "scan" in raw:
            scan = raw["scan"]
            if not isinstance(scan, list) or len(scan) != 3:
                raise ScenarioError("scan", "expected [beta_min, beta_max, points]")
            lo, hi = _vector(scan[:2], "scan")
            pts = _integer({"scan": scan[2]}, "scan", 2)
            if not lo < hi:
                raise ScenarioError("scan", "beta_min must be below beta_max")
            s.scan = [lo, hi, pts]
    _check_loadable(s)
    return s


def load_game(s: Scenario) -> np.ndarray | None:
    if s.game is None:
        return None
    return read_payoff(s.resolve(s.game)) if isinstance(s.game, str) else check_payoff(s.game)


def load_initial(s: Scenario) -> np.ndarray:
    """Distribution for classical runs, density matrix for quantum runs."""
    if s.kind == "quantum":
        if isinstance(s.initial, dict):
            return check_density(np.array(s.initial["rho_real"]) + 1j * np.array(s.initial["rho_imag"]))
        return quantize(s.initial, s.mode)
    return check_distribution(s.initial)


def load_spectrum(s: Scenario) -> np.ndarray:
    return read_spectrum(s.resolve(s.spectrum)) if isinstance(s.spectrum, str) else check_spectrum(s.spectrum)


def load_joint(s: Scenario) -> np.ndarray | None:
    if s.joint is None:
        return None
    return read_joint(s.resolve(s.joint)) if isinstance(s.joint, str) else check_joint(s.joint)


def _check_loadable(s: Scenario) -> None:
    """Parse referenced files and cross-check dimensions before any run."""
    for key, loader in (("game", load_game), ("initial", load_initial), ("spectrum", load_spectrum), ("joint", load_joint)):
        if getattr(s, key) is None:
            continue
        try:
            loader(s)
        except (ValueError, OSError) as exc:
            raise ScenarioError(key, str(exc)) from None
    if s.game is not None:
        n = load_game(s).shape[0]
        m = load_initial(s).shape[0]
        if n != m:
            raise ScenarioError("game", f"{n} strategies but initial state has dimension {m}")
    if s.target_mean_energy is not None:
        e = load_spectrum(s)
        if not e.min() < s.target_mean_energy < e.max():
            raise ScenarioError(
                "target_mean_energy", f"must lie strictly inside ({e.min()!r}, {e.max()!r})"
            )


def parse_scenario(path) -> Scenario:
    """Read and validate a scenario file. I/O errors propagate as ``OSError``."""
    path = Path(path)
    text = path.read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("<json>", f"invalid JSON: {exc}") from None
    return validate(raw, path.resolve().parent, path.stem)
