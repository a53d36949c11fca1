"""Payoff matrices, strategy distributions and the matrix form of the replicator flow.

The commutator form of the replicator dynamics writes the population state as
the rank-one matrix ``X_ij = sqrt(x_i x_j)`` and evolves it by
``dX/dt = [Lambda, X]`` with ``Lambda = [Q, X]`` and ``Q = diag(f) / 2``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels

SIMPLEX_TOL = 1e-12
RENORMALIZE_TOL = 1e-9


class SimplexDriftWarning(UserWarning):
    """A distribution was slightly off the simplex and has been renormalized."""


def check_payoff(a) -> np.ndarray:
    """Return ``a`` as a finite, square float matrix or raise ``ValueError``."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"payoff matrix must be square with n >= 1, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("payoff matrix has non-finite entries")
    return a


def check_distribution(x, tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Validate a point on the probability simplex.

    Vectors off the simplex by at most ``RENORMALIZE_TOL`` (in the sum or as
    negative entries) are clamped and renormalized with a
    :class:`SimplexDriftWarning`; larger violations raise ``ValueError``.
    """
    x = np.array(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ValueError(f"distribution must be a non-empty vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("distribution has non-finite entries")
    drift = max(abs(x.sum() - 1.0), float(-x.min()) if x.min() < 0 else 0.0)
    if drift <= tol and x.min() >= 0:
        return x
    if drift > RENORMALIZE_TOL:
        raise ValueError(f"not a probability vector (off the simplex by {drift:.3g})")
    warnings.warn(f"renormalized distribution drifting by {drift:.3g}", SimplexDriftWarning, stacklevel=2)
    x = np.clip(x, 0.0, None)
    return x / x.sum()


def _check_pair(a, x):
    a = check_payoff(a)
    x = check_distribution(x)
    if a.shape[0] != x.size:
        raise ValueError(f"payoff matrix is {a.shape[0]}x{a.shape[0]} but distribution has {x.size} entries")
    return a, x


@dataclass(frozen=True)
class FitnessReport:
    f: np.ndarray
    mean: float
    u: np.ndarray


def fitness(a, x) -> FitnessReport:
    """Strategy fitnesses ``A x``, the mean ``x.A.x`` and the excess fitness."""
    a, x = _check_pair(a, x)
    f = a @ x
    mean = float(x @ f)
    return FitnessReport(f=f, mean=mean, u=f - mean)


def frequency_matrix(x) -> np.ndarray:
    """``X_ij = sqrt(x_i x_j)``; the diagonal reproduces ``x`` bit for bit."""
    x = check_distribution(x)
    return np.sqrt(np.outer(x, x))


def lambda_matrix(a, x) -> np.ndarray:
    """Antisymmetric generator ``[Q, X]`` with ``Q = diag(f)/2``."""
    rep = fitness(a, x)
    X = frequency_matrix(x)
    half_f = 0.5 * rep.f
    return half_f[:, None] * X - X * half_f[None, :]


def theta_matrix(a, x) -> np.ndarray:
    """Right-hand side of ``dX/dt``, evaluated by the element-wise formula.

    ``Theta_ij = f_i X_ij / 2 + f_j X_ji / 2 - <f> X_ij``. This is a direct
    sum over payoff entries and does not go through a commutator, so it can
    be checked against ``commutator(lambda_matrix, frequency_matrix)``.
    """
    a, x = _check_pair(a, x)
    return kernels.theta_elements(a, x)


def commutator(p, q) -> np.ndarray:
    return p @ q - q @ p


def replicator_field(a, x) -> np.ndarray:
    """``U_i x_i``, the classical replicator velocity."""
    a, x = _check_pair(a, x)
    return kernels.replicator_field(a, x)


@dataclass(frozen=True)
class NashReport:
    is_nash: bool
    # f_i - <f> beyond tolerance for profitable deviations, and <f> - f_i for
    # underperforming strategies in the support; zero where satisfied
    violations: np.ndarray

    def __bool__(self) -> bool:
        return self.is_nash


def is_nash(a, x, tol: float = 1e-9) -> NashReport:
    """Check the symmetric Nash condition of the evolutionary game.

    No strategy may earn more than ``<f> + tol``, and every strategy played
    with weight above ``tol`` must earn at least ``<f> - tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    rep = fitness(a, x)
    x = check_distribution(x)
    gain = np.clip(rep.u - tol, 0.0, None)
    loss = np.where(x > tol, np.clip(-rep.u - tol, 0.0, None), 0.0)
    violations = gain + loss
    return NashReport(is_nash=bool(np.all(violations == 0.0)), violations=violations)
