"""Gibbs ensembles over a discrete energy spectrum.

Entropies are in nats. ``beta`` may be negative (population inversion).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import entropy_of

DEGENERATE_VAR = 1e-12


def check_spectrum(levels) -> np.ndarray:
    e = np.asarray(levels, dtype=float).ravel()
    if e.size < 1 or not np.all(np.isfinite(e)):
        raise ValueError("energy spectrum needs at least one finite level")
    return e


@dataclass(frozen=True)
class GibbsEnsemble:
    levels: np.ndarray
    beta: float
    log_z: float
    populations: np.ndarray
    mean_e: float
    var_e: float
    third_e: float
    entropy_nats: float

    @property
    def z(self) -> float:
        return math.exp(self.log_z)

    @property
    def temperature(self) -> float:
        return math.inf if self.beta == 0 else 1.0 / self.beta


def gibbs(levels, beta: float) -> GibbsEnsemble:
    """Populations ``exp(-beta E_k) / Z`` computed with a shifted exponent."""
    e = check_spectrum(levels)
    beta = float(beta)
    if not math.isfinite(beta):
        raise ValueError("beta must be finite")
    with np.errstate(over="ignore", invalid="ignore"):
        be = beta * e
    if not np.all(np.isfinite(be)):
        raise OverflowError(f"beta * E overflows for beta={beta!r}")
    if np.ptp(e) == 0:
        p = np.full(e.size, 1.0 / e.size)
        shift = float(be[0])
    else:
        shift = float(be.min())
        w = np.exp(-(be - shift))
        p = w / w.sum()
    log_z = -shift + math.log(float(np.exp(-(be - shift)).sum()))
    if not math.isfinite(log_z) or not np.all(np.isfinite(p)):
        raise OverflowError(f"partition function overflows at beta={beta!r} (log Z = {log_z!r})")
    mean = float(p @ e)
    d = e - mean
    return GibbsEnsemble(
        levels=e,
        beta=beta,
        log_z=log_z,
        populations=p,
        mean_e=mean,
        var_e=float(p @ d**2),
        third_e=float(p @ d**3),
        entropy_nats=entropy_of(p, "nats"),
    )


@dataclass(frozen=True)
class ThermoDerivatives:
    dS_dE: float
    d2S_dE2: float | None  # None when the spectrum has no fluctuations
    dS_dbeta: float
    d2S_dbeta2: float


def thermo_derivatives(levels, beta: float) -> ThermoDerivatives:
    """Derivatives of the Gibbs entropy in ``<E>`` and in ``beta``.

    ``dS/d<E> = beta``, ``d2S/d<E>2 = d(beta)/d<E> = -1/var``,
    ``dS/dbeta = -beta var`` and
    ``d2S/dbeta2 = d<E>/dbeta + beta d2<E>/dbeta2 = -var + beta mu3``,
    where ``mu3`` is the third central moment.
    """
    g = gibbs(levels, beta)
    return ThermoDerivatives(
        dS_dE=g.beta,
        d2S_dE2=-1.0 / g.var_e if g.var_e > DEGENERATE_VAR else None,
        dS_dbeta=-g.beta * g.var_e,
        d2S_dbeta2=-g.var_e + g.beta * g.third_e,
    )


def fit_beta(levels, target_mean_e: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Inverse temperature whose Gibbs mean energy equals ``target_mean_e``.

    Expands a bracket geometrically from ``beta = 0`` and bisects on the
    decreasing map ``beta -> <E>``.
    """
    e = check_spectrum(levels)
    lo_e, hi_e = float(e.min()), float(e.max())
    if not lo_e < target_mean_e < hi_e:
        raise ValueError(f"target mean energy {target_mean_e!r} outside attainable interval ({lo_e!r}, {hi_e!r})")

    def excess(b):
        return gibbs(e, b).mean_e - target_mean_e

    f0 = excess(0.0)
    if f0 == 0.0:
        return 0.0
    # mean energy falls with beta: go positive when it is still too high
    sign = 1.0 if f0 > 0 else -1.0
    a, b = 0.0, sign
    while excess(b) * sign > 0:
        a, b = b, 2.0 * b
        if abs(b) > 1e300:
            raise ArithmeticError("could not bracket beta")
    lo, hi = min(a, b), max(a, b)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = excess(mid)
        if fm == 0.0:
            return mid
        if fm > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class MaxEntReport:
    passed: bool
    gibbs_entropy: float
    worst_entropy: float
    worst: np.ndarray
    trials: int


def _constrained_sample(rng, g: GibbsEnsemble, c: np.ndarray, c_pinv: np.ndarray, b: np.ndarray) -> np.ndarray:
    q = rng.dirichlet(np.ones(g.levels.size))
    q = q - c_pinv @ (c @ q - b)
    step = q - g.populations
    neg = step < 0
    t = 1.0
    if np.any(neg):
        t = min(1.0, float(np.min(g.populations[neg] / -step[neg])))
    return np.clip(g.populations + t * step, 0.0, None)


def maxent_verify(levels, beta: float, trials: int = 1000, seed: int = 0) -> MaxEntReport:
    """Sample distributions with the Gibbs mean energy and compare entropies.

    Random Dirichlet draws are projected onto the constraint plane
    ``{sum p = 1, sum p E = <E>}`` and pulled toward the Gibbs point until
    non-negative. None may exceed the Gibbs entropy by more than 1e-9.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    g = gibbs(levels, beta)
    c = np.vstack([np.ones(g.levels.size), g.levels])
    b = np.array([1.0, g.mean_e])
    c_pinv = np.linalg.pinv(c)
    rng = np.random.default_rng(seed)
    worst = g.populations
    worst_s = -math.inf
    for _ in range(trials):
        p = _constrained_sample(rng, g, c, c_pinv, b)
        s = entropy_of(p, "nats")
        if s > worst_s:
            worst, worst_s = p, s
    return MaxEntReport(
        passed=worst_s <= g.entropy_nats + 1e-9,
        gibbs_entropy=g.entropy_nats,
        worst_entropy=worst_s,
        worst=worst,
        trials=trials,
    )
