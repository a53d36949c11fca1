"""Replicator dynamics on the simplex and the Shannon entropy of the population."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import IntegrationError
from .game import _check_pair, check_distribution, fitness

_LOG = {"nats": math.log, "bits": math.log2}


class EntropyValue(float):
    """A float that remembers the logarithm base it was computed in."""

    base: str

    def __new__(cls, value: float, base: str = "nats"):
        obj = super().__new__(cls, value)
        obj.base = base
        return obj

    def __repr__(self) -> str:
        return f"EntropyValue({float(self)!r}, base={self.base!r})"


def _check_base(base: str) -> None:
    if base not in _LOG:
        raise ValueError(f"entropy base must be 'nats' or 'bits', got {base!r}")


def entropy_of(p, base: str = "nats") -> float:
    """Shannon entropy of a non-negative weight vector, with 0 log 0 = 0."""
    _check_base(base)
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    h = float(-np.sum(p * np.log(p)))
    if base == "bits":
        h /= math.log(2)
    return max(h, 0.0)


def shannon_entropy(x, base: str = "nats") -> EntropyValue:
    return EntropyValue(entropy_of(check_distribution(x), base), base)


def matrix_entropy(X) -> EntropyValue:
    """``-Tr(X ln X)`` with the off-diagonal elements of ``X`` set to zero."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError("frequency matrix must be square")
    return EntropyValue(entropy_of(np.diag(X), "nats"), "nats")


def entropy_rate_classical(a, x) -> float:
    """Exact ``dH/dt`` along the replicator flow, in nats per unit time.

    Evaluates ``Tr(U (Htilde - X))`` with ``U = diag(f_i - <f>)``,
    ``Htilde = diag(-x_i ln x_i)`` and ``X = diag(x)``.
    """
    u = fitness(a, x).u
    x = check_distribution(x)
    safe = np.where(x > 0, x, 1.0)
    h_tilde = np.where(x > 0, -x * np.log(safe), 0.0)
    return float(np.sum(u * (h_tilde - x)))


def replicator_step(a, x, dt: float) -> np.ndarray:
    """One RK4 step of ``dx_i/dt = U_i x_i``, clamped and renormalized."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    a, x = _check_pair(a, x)
    return kernels.rk4_step(a, x, float(dt))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    entropies: np.ndarray
    base: str = "nats"

    def __post_init__(self):
        if not len(self.times) == len(self.states) == len(self.entropies):
            raise ValueError("times, states and entropies must have equal lengths")

    def __len__(self) -> int:
        return len(self.times)


def time_grid(t_end: float, dt: float) -> tuple[int, float]:
    """Number of full ``dt`` steps to reach ``t_end`` and the leftover step.

    The leftover is 0 when ``t_end`` is a multiple of ``dt`` up to rounding.
    """
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if dt > t_end:
        raise ValueError(f"dt={dt} exceeds t_end={t_end}")
    ratio = t_end / dt
    nfull = int(round(ratio))
    if abs(ratio - nfull) <= 1e-9 * max(1.0, ratio):
        return nfull, 0.0
    nfull = int(math.floor(ratio))
    return nfull, t_end - nfull * dt


def simulate_classical(a, x0, t_end: float, dt: float, base: str = "nats") -> Trajectory:
    """Integrate the replicator flow from ``x0``, sampling every step."""
    _check_base(base)
    a, x0 = _check_pair(a, x0)
    nfull, rest = time_grid(t_end, dt)
    try:
        states = kernels.integrate(a, x0, float(dt), nfull)
    except IntegrationError as exc:
        raise IntegrationError(f"{exc} at t={exc.step * dt + dt:.6g}", exc.step, exc.step * dt + dt) from None
    times = np.arange(nfull + 1) * dt
    if rest > 0:
        try:
            last = kernels.rk4_step(a, states[-1], rest)
        except IntegrationError as exc:
            raise IntegrationError(f"{exc} at t={t_end:.6g}", nfull, t_end) from None
        states = np.vstack([states, last])
        times = np.append(times, t_end)
    safe = np.where(states > 0, states, 1.0)
    entropies = np.clip(-np.sum(states * np.log(safe), axis=1), 0.0, None)
    if base == "bits":
        entropies /= math.log(2)
    return Trajectory(times=times, states=states, entropies=entropies, base=base)
