"""Run validated scenarios and write their outputs.

Every output file is first written into a hidden staging directory next to
the run directory and only moved into place once the whole pipeline has
succeeded, so a failed or interrupted run leaves no partial files behind.
"""
from __future__ import annotations

import os
import shutil
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .battery import CHECKS, entanglement_demo, run_battery
from .classical import entropy_of, entropy_rate_classical, simulate_classical
from .game import fitness, is_nash
from .infotheory import conditional_entropy, joint_entropy, marginals, mutual_entropy
from .io import atomic_write_text, classical_csv, fmt, format_report, quantum_csv
from .quantum import Hamiltonian, hamiltonian_from_game, simulate_quantum
from .scenario import Scenario, load_game, load_initial, load_joint, load_spectrum
from .thermo import fit_beta, gibbs, maxent_verify, thermo_derivatives

OUT_ENV = "ENTRODYN_OUT"


class PipelineError(RuntimeError):
    """A scenario passed validation but its pipeline failed."""


@dataclass
class RunResult:
    scenario: Scenario
    files: list[Path]
    summary: dict
    checks: dict = field(default_factory=dict)


def output_dir(s: Scenario) -> Path:
    root = os.environ.get(OUT_ENV) or s.outputs
    root = Path(root)
    if not root.is_absolute():
        root = Path.cwd() / root
    return root / s.name


def _classical(s: Scenario, stage: Path):
    a = load_game(s)
    x0 = load_initial(s)
    traj = simulate_classical(a, x0, s.t_end, s.dt, s.base)
    x_end = traj.states[-1]
    field_norm = float(np.max(np.abs(fitness(a, x_end).u * x_end)))
    atomic_write_text(stage / "trajectory.csv", classical_csv(traj))
    summary = {
        "samples": len(traj),
        "t_end": float(traj.times[-1]),
        "initial_entropy": float(traj.entropies[0]),
        "final_entropy": float(traj.entropies[-1]),
        "final_state": x_end,
        "mean_entropy_rate": float((traj.entropies[-1] - traj.entropies[0]) / (traj.times[-1] - traj.times[0])),
        "final_entropy_rate_nats": entropy_rate_classical(a, x_end),
        "replicator_field_norm": field_norm,
        "fixed_point": field_norm < 1e-9,
        "nash": bool(is_nash(a, x_end, s.nash_tol)),
    }
    n = traj.states.shape[1]
    h_max = np.log(n) / (np.log(2) if s.base == "bits" else 1.0)
    checks = {
        "simplex_preserved": bool(
            np.all(np.abs(traj.states.sum(axis=1) - 1.0) <= 1e-9) and traj.states.min() >= 0
        ),
        "entropy_bounds": bool(np.all((traj.entropies >= 0) & (traj.entropies <= h_max + 1e-12))),
    }
    return ["trajectory.csv"], summary, checks


def _quantum(s: Scenario, stage: Path):
    rho0 = load_initial(s)
    n = rho0.shape[0]
    a = load_game(s)
    if a is None:
        h = Hamiltonian(np.zeros((n, n)), s.hbar)
    else:
        h = hamiltonian_from_game(a, np.clip(np.diag(rho0).real, 0, None) / np.trace(rho0).real, s.hbar)
    traj = simulate_quantum(rho0, h, s.gamma, s.t_end, s.dt, s.base)
    atomic_write_text(stage / "trajectory.csv", quantum_csv(traj))
    states = traj.states
    herm = float(np.max(np.abs(states - np.conj(np.swapaxes(states, 1, 2)))))
    trace = float(np.max(np.abs(np.trace(states, axis1=1, axis2=2) - 1.0)))
    spectra = np.linalg.eigvalsh(states)
    finite = np.isfinite(traj.rate_exact)
    gap = np.abs(traj.rate_series[finite] - traj.rate_exact[finite])
    pops = np.clip(np.diag(rho0).real, 0.0, None)
    summary = {
        "samples": len(traj),
        "gamma": s.gamma,
        "hbar": s.hbar,
        "initial_entropy": float(traj.entropies[0]),
        "final_entropy": float(traj.entropies[-1]),
        "max_entropy_drift": float(np.max(np.abs(traj.entropies - traj.entropies[0]))),
        "max_spectrum_drift": float(np.max(np.abs(spectra - spectra[0]))),
        "max_trace_error": trace,
        "max_hermiticity_error": herm,
        "population_entropy": entropy_of(pops / pops.sum(), s.base),
        "final_series_rate": float(traj.rate_series[-1]),
        "final_exact_rate": float(traj.rate_exact[-1]),
        "max_series_exact_gap": float(gap.max()) if gap.size else None,
    }
    checks = {"trace_preserved": trace < 1e-9, "hermitian": herm < 1e-9}
    if s.gamma == 0:
        checks["unitary_entropy_conserved"] = summary["max_entropy_drift"] < 1e-9
    elif a is None:
        checks["dephasing_entropy_nondecreasing"] = bool(np.all(np.diff(traj.entropies) >= -1e-10))
    return ["trajectory.csv"], summary, checks


def _infotheory(s: Scenario, stage: Path):
    base = s.base
    rng = np.random.default_rng(s.seed)
    rows, flags = run_battery(rng, s.instances, base)
    cols = list(rows[0])
    lines = [",".join(cols)] + [",".join(str(r[c]) if c == "instance" else fmt(r[c]) for c in cols) for r in rows]
    atomic_write_text(stage / "battery.csv", "\n".join(lines) + "\n")
    summary = {"instances": s.instances, "base": base}
    j = load_joint(s)
    if j is not None:
        pa, pb = marginals(j)
        summary.update(
            {
                "H_A": entropy_of(pa, base),
                "H_B": entropy_of(pb, base),
                "H_AB": joint_entropy(j, base),
                "H_A_colon_B": mutual_entropy(j, base),
                "H_A_given_B": conditional_entropy(j, base),
            }
        )
    ent = entanglement_demo(base)
    for label, qc in ent.items():
        summary[f"S_A_given_B_{label}"] = qc.value
    checks = {name: bool(flags[name]) for name in CHECKS}
    checks["entanglement_witness_bell"] = ent["bell"].entangled_witness
    checks["no_witness_product"] = not ent["product"].entangled_witness
    checks["no_witness_classical"] = not ent["classical"].entangled_witness
    return ["battery.csv"], summary, checks


def _thermo(s: Scenario, stage: Path):
    e = load_spectrum(s)
    if s.beta is not None:
        beta = s.beta
    else:
        beta = fit_beta(e, s.target_mean_energy)
    g = gibbs(e, beta)
    d = thermo_derivatives(e, beta)
    roundtrip = abs(fit_beta(e, g.mean_e) - beta) if np.ptp(e) > 0 else 0.0
    me = maxent_verify(e, beta, s.trials, seed=s.seed)
    lo, hi, pts = s.scan
    lines = ["beta,log_Z,mean_E,var_E,S,dS_dbeta"]
    for b in np.linspace(lo, hi, int(pts)):
        gb = gibbs(e, b)
        lines.append(",".join(fmt(v) for v in (b, gb.log_z, gb.mean_e, gb.var_e, gb.entropy_nats, -b * gb.var_e)))
    atomic_write_text(stage / "scan.csv", "\n".join(lines) + "\n")
    identity = abs(g.entropy_nats - (g.log_z + g.beta * g.mean_e))
    summary = {
        "beta": beta,
        "log_Z": g.log_z,
        "mean_E": g.mean_e,
        "var_E": g.var_e,
        "entropy_nats": g.entropy_nats,
        "populations": g.populations,
        "identity_residual": identity,
        "dS_dE": d.dS_dE,
        "d2S_dE2": d.d2S_dE2,
        "dS_dbeta": d.dS_dbeta,
        "d2S_dbeta2": d.d2S_dbeta2,
        "beta_roundtrip_error": roundtrip,
        "maxent_worst_entropy": me.worst_entropy,
    }
    if s.target_mean_energy is not None:
        summary["target_mean_energy"] = s.target_mean_energy
        summary["fit_residual"] = abs(g.mean_e - s.target_mean_energy)
    checks = {
        "entropy_identity": identity <= 1e-10,
        "beta_roundtrip": roundtrip <= 1e-8,
        "maxent": me.passed,
    }
    return ["scan.csv"], summary, checks


PIPELINES = {"classical": _classical, "quantum": _quantum, "infotheory": _infotheory, "thermo": _thermo}


def run_scenario(s: Scenario) -> RunResult:
    """Run ``s`` and publish its CSV and ``summary.txt`` into the run directory."""
    out = output_dir(s)
    out.parent.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=f".{s.name}.", suffix=".staging", dir=out.parent))
    try:
        start = time.perf_counter()
        try:
            names, summary, checks = PIPELINES[s.kind](s, stage)
        except Exception as exc:
            raise PipelineError(f"{s.kind} scenario {s.name!r} failed: {exc}") from exc
        summary["wall_clock_s"] = time.perf_counter() - start
        result = RunResult(scenario=s, files=[out / f for f in names] + [out / "summary.txt"], summary=summary, checks=checks)
        atomic_write_text(stage / "summary.txt", report(result))
        out.mkdir(parents=True, exist_ok=True)
        for f in names + ["summary.txt"]:
            os.replace(stage / f, out / f)
    finally:
        shutil.rmtree(stage, ignore_errors=True)
    return result


def report(r: RunResult) -> str:
    """Scenario echo, headline numbers, check table and file manifest."""
    parts = [f"# entrodyn {__version__} run report", "[scenario]"]
    parts.append(format_report(r.scenario.echo()).rstrip("\n"))
    parts.append("[summary]")
    parts.append(format_report(r.summary).rstrip("\n"))
    parts.append("[checks]")
    for name, ok in r.checks.items():
        parts.append(f"{name}={'pass' if ok else 'fail'}")
    parts.append("[files]")
    parts.extend(str(p) for p in r.files)
    return "\n".join(parts) + "\n"
