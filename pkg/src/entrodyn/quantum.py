"""Density operators for games: quantization, von Neumann evolution and entropy.

Populations ``rho_ii`` play the role of strategy frequencies and coherences
``rho_ij`` the role of ``sqrt(x_i x_j)``. The game generator ``Lambda`` maps
to a Hamiltonian through ``Lambda -> -(i/hbar) H``.

Decoherence is modelled by a pure dephasing channel in the strategy basis,
``drho/dt = -(i/hbar)[H, rho] - gamma (rho - diag(rho))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .classical import EntropyValue, _check_base, time_grid
from .game import check_distribution, frequency_matrix, lambda_matrix

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def check_density(rho, atol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``rho`` as a complex matrix after checking it is a valid state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 1:
        raise ValueError(f"density operator must be square, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density operator has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValueError("density operator is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density operator has trace {tr.real:.15g}, expected 1")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -PSD_TOL:
        raise ValueError(f"density operator is not positive semidefinite (eigenvalue {lo:.3g})")
    return rho


@dataclass(frozen=True)
class PureEnsemble:
    states: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        states = np.atleast_2d(np.asarray(self.states, dtype=complex))
        probs = np.asarray(self.probs, dtype=float)
        if states.shape[0] != probs.size:
            raise ValueError("need one probability per state")
        norms = np.linalg.norm(states, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("ensemble states must have unit norm")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("ensemble weights must be a probability vector")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probs", probs)


@dataclass(frozen=True)
class Hamiltonian:
    h: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("Hamiltonian must be a square matrix")
        if np.max(np.abs(h - h.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError("Hamiltonian is not Hermitian")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return self.h.shape[0]

    def propagator(self, dt: float) -> np.ndarray:
        """``exp(-i H dt / hbar)`` from the eigendecomposition of ``H``."""
        w, v = np.linalg.eigh(self.h)
        return (v * np.exp(-1j * w * dt / self.hbar)) @ v.conj().T


def _as_hamiltonian(h) -> Hamiltonian:
    return h if isinstance(h, Hamiltonian) else Hamiltonian(h)


def ensemble_density(e: PureEnsemble) -> np.ndarray:
    """``sum_k p_k |psi_k><psi_k|``."""
    rho = np.einsum("k,ki,kj->ij", e.probs, e.states, e.states.conj())
    return check_density(rho)


def quantize(x, mode: str = "coherent") -> np.ndarray:
    """Map a strategy distribution to a density operator.

    ``coherent`` keeps the coherences ``sqrt(x_i x_j)`` and gives a pure
    state; ``diagonal`` drops them and gives ``diag(x)``.
    """
    x = check_distribution(x)
    if mode == "coherent":
        return frequency_matrix(x).astype(complex)
    if mode == "diagonal":
        return np.diag(x).astype(complex)
    raise ValueError(f"mode must be 'coherent' or 'diagonal', got {mode!r}")


def hamiltonian_from_game(a, x, hbar: float = 1.0) -> Hamiltonian:
    """``H = i hbar Lambda``; Hermitian because ``Lambda`` is real antisymmetric."""
    if not hbar > 0:
        raise ValueError("hbar must be positive")
    return Hamiltonian(1j * hbar * lambda_matrix(a, x), hbar)


def von_neumann_step(rho, h, dt: float) -> np.ndarray:
    """Exact unitary propagation ``U rho U^dagger`` over ``dt``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    h = _as_hamiltonian(h)
    rho = check_density(rho)
    u = h.propagator(dt)
    out = u @ rho @ u.conj().T
    return 0.5 * (out + out.conj().T)


def rho_dot(rho, h, gamma: float = 0.0) -> np.ndarray:
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    h = _as_hamiltonian(h)
    rho = np.asarray(rho, dtype=complex)
    out = (-1j / h.hbar) * (h.h @ rho - rho @ h.h)
    if gamma:
        out -= gamma * (rho - np.diag(np.diag(rho)))
    return out


def _entropy_from_eigs(lam: np.ndarray) -> np.ndarray:
    """Entropy per row of eigenvalues, clamping roundoff negatives."""
    if np.any(lam < -PSD_TOL):
        raise ValueError(f"density operator is not positive semidefinite (eigenvalue {lam.min():.3g})")
    lam = np.clip(lam, 0.0, 1.0)
    safe = np.where(lam > 0, lam, 1.0)
    return np.clip(-np.sum(lam * np.log(safe), axis=-1), 0.0, None)


def von_neumann_entropy(rho, base: str = "nats") -> EntropyValue:
    """``-Tr(rho ln rho)`` from the spectrum, with ``0 ln 0 = 0``."""
    _check_base(base)
    rho = check_density(rho)
    s = float(_entropy_from_eigs(np.linalg.eigvalsh(rho)))
    if base == "bits":
        s /= np.log(2)
    return EntropyValue(s, base)


def entropy_rate_series(rho, rhodot) -> float:
    """``dS/dt`` with ``ln rho`` replaced by its cubic expansion about ``I``.

    Differentiating ``-Tr(rho ln rho)`` with
    ``ln rho ~ (rho-I) - (rho-I)^2/2 + (rho-I)^3/3`` gives
    ``11/6 Tr(r') - 6 Tr(r r') + 9/2 Tr(r^2 r') - 4/3 Tr(r^3 r')``; the
    truncation remainder is dropped.
    """
    rho = np.asarray(rho, dtype=complex)
    rhodot = np.asarray(rhodot, dtype=complex)
    if np.max(np.abs(rhodot - rhodot.conj().T)) > 1e-10:
        raise ValueError("rho_dot must be Hermitian")
    if abs(np.trace(rhodot)) > 1e-10:
        raise ValueError("rho_dot must be traceless")
    return float(_series_rate(rho[None], rhodot[None])[0])


def _series_rate(rho: np.ndarray, rhodot: np.ndarray) -> np.ndarray:
    # stacked (T, n, n) arrays
    r2 = rho @ rho
    r3 = r2 @ rho
    val = (
        (11.0 / 6.0) * np.trace(rhodot, axis1=-2, axis2=-1)
        - 6.0 * np.einsum("tij,tji->t", rho, rhodot)
        + 4.5 * np.einsum("tij,tji->t", r2, rhodot)
        - (4.0 / 3.0) * np.einsum("tij,tji->t", r3, rhodot)
    )
    if np.max(np.abs(val.imag), initial=0.0) > 1e-10:
        raise ValueError("series entropy rate has a non-negligible imaginary part")
    return val.real


def entropy_rate_exact(rho, rhodot) -> float:
    """``-Tr(rho_dot ln rho)`` by eigendecomposition.

    Returns ``inf`` when probability flows into a zero eigenvalue, where the
    entropy has a vertical tangent.
    """
    rho = np.asarray(rho, dtype=complex)
    rhodot = np.asarray(rhodot, dtype=complex)
    return float(_exact_rate(rho[None], rhodot[None])[0])


def _exact_rate(rho: np.ndarray, rhodot: np.ndarray) -> np.ndarray:
    lam, v = np.linalg.eigh(rho)
    # eigenvalue velocities: diagonal of V^dagger rho_dot V
    flow = np.einsum("tki,tkl,tli->ti", v.conj(), rhodot, v).real
    null = lam <= PSD_TOL
    terms = -flow * np.log(np.where(null, 1.0, lam))
    out = terms.sum(axis=-1)
    inflow = np.any(null & (flow > 1e-12), axis=-1)
    out[inflow] = np.inf
    return out


@dataclass(frozen=True)
class QuantumTrajectory:
    times: np.ndarray
    states: np.ndarray
    entropies: np.ndarray
    rate_series: np.ndarray
    rate_exact: np.ndarray
    base: str = "nats"
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)


def _unitary_orbit(rho0: np.ndarray, h: Hamiltonian, times: np.ndarray) -> np.ndarray:
    """``rho(t)`` at every ``t`` directly from ``rho0`` in the eigenbasis of ``H``.

    Each sample is one phase rotation away from the initial state, so
    roundoff does not accumulate over long runs the way it does when
    composing many step propagators.
    """
    w, v = np.linalg.eigh(h.h)
    r0 = v.conj().T @ rho0 @ v
    phase = np.exp(-1j * np.outer(times, w) / h.hbar)
    r = r0[None] * phase[:, :, None] * phase.conj()[:, None, :]
    states = v[None] @ r @ v.conj().T[None]
    return 0.5 * (states + np.conj(np.swapaxes(states, 1, 2)))


def simulate_quantum(rho0, h, gamma: float, t_end: float, dt: float, base: str = "nats") -> QuantumTrajectory:
    """Evolve ``rho0`` under ``H`` with dephasing rate ``gamma``.

    With ``gamma = 0`` every sample is the exact unitary image of ``rho0``.
    Otherwise steps are Strang-split: coherences damped by
    ``exp(-gamma dt/2)``, unitary step, damped again. Entropy rates are in
    nats per unit time regardless of ``base``.
    """
    _check_base(base)
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    h = _as_hamiltonian(h)
    rho0 = check_density(rho0)
    n = rho0.shape[0]
    if h.n != n:
        raise ValueError(f"Hamiltonian is {h.n}x{h.n} but state is {n}x{n}")
    nfull, rest = time_grid(t_end, dt)

    def damp(step):
        if not gamma:
            return None
        d = np.full((n, n), np.exp(-0.5 * gamma * step))
        np.fill_diagonal(d, 1.0)
        return d

    times = np.arange(nfull + 1) * dt
    if rest > 0:
        times = np.append(times, t_end)
    if not gamma:
        states = _unitary_orbit(rho0, h, times)
    else:
        states = kernels.propagate(rho0, h.propagator(dt), damp(dt), nfull)
        if rest > 0:
            last = kernels.propagate(states[-1], h.propagator(rest), damp(rest), 1)[1:]
            states = np.concatenate([states, last])

    lam = np.linalg.eigvalsh(states)
    bad = np.argwhere(lam.min(axis=-1) < -PSD_TOL)
    if bad.size:
        k = int(bad[0, 0])
        raise ValueError(f"state lost positivity at t={times[k]:.6g}")
    entropies = _entropy_from_eigs(lam)
    if base == "bits":
        entropies = entropies / np.log(2)
    drift = np.abs(np.trace(states, axis1=1, axis2=2) - 1.0)
    if drift.max() > 1e-9:
        k = int(np.argmax(drift))
        raise ValueError(f"trace drifted by {drift[k]:.3g} at t={times[k]:.6g}")

    rhodot = (-1j / h.hbar) * (h.h @ states - states @ h.h)
    if gamma:
        off = states.copy()
        idx = np.arange(n)
        off[:, idx, idx] = 0.0
        rhodot -= gamma * off
    return QuantumTrajectory(
        times=times,
        states=states,
        entropies=entropies,
        rate_series=_series_rate(states, rhodot),
        rate_exact=_exact_rate(states, rhodot),
        base=base,
        meta={"gamma": gamma, "hbar": h.hbar},
    )
