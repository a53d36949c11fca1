"""Information measures between players' strategy variables.

Classical measures default to bits. Bipartite quantum states use row-major
composite indexing: basis state ``(i_A, i_B)`` sits at ``i_A * n_B + i_B``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import _check_base, entropy_of
from .game import check_distribution
from .quantum import _entropy_from_eigs, check_density

PROB_TOL = 1e-12
SLACK = 1e-10


def _to_base(value_nats: float, base: str) -> float:
    _check_base(base)
    return value_nats / math.log(2) if base == "bits" else value_nats


def check_joint(j) -> np.ndarray:
    j = np.asarray(j, dtype=float)
    if j.ndim != 2 or j.size == 0:
        raise ValueError(f"joint distribution must be a non-empty matrix, got shape {j.shape}")
    if not np.all(np.isfinite(j)) or np.any(j < 0):
        raise ValueError("joint distribution needs finite non-negative entries")
    if abs(j.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"joint distribution sums to {j.sum():.15g}, expected 1")
    return j


def check_kernel(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if k.ndim != 2 or np.any(k < 0) or np.any(np.abs(k.sum(axis=1) - 1.0) > PROB_TOL):
        raise ValueError("transition kernel must be row-stochastic")
    return k


def marginals(j) -> tuple[np.ndarray, np.ndarray]:
    j = check_joint(j)
    return j.sum(axis=1), j.sum(axis=0)


def joint_entropy(j, base: str = "bits") -> float:
    return entropy_of(check_joint(j), base)


def mutual_entropy(j, base: str = "bits") -> float:
    """``-sum x_ij log x_{i:j}`` with ``x_{i:j} = (sum_i x_ij)(sum_j x_ij) / x_ij``.

    Empty cells contribute nothing. The result is the mutual information
    ``H(A) + H(B) - H(A,B)``.
    """
    j = check_joint(j)
    _check_base(base)
    pa, pb = j.sum(axis=1), j.sum(axis=0)
    mask = j > 0
    ratio = np.outer(pa, pb)[mask] / j[mask]
    value = float(-np.sum(j[mask] * np.log(ratio)))
    return max(_to_base(value, base), 0.0)


def conditional_entropy(j, base: str = "bits") -> float:
    """``H(A|B)`` for rows indexed by A and columns by B.

    Computed both as ``H(A,B) - H(B)`` and as ``-sum x_ij log x_{i|j}``;
    a mismatch beyond 1e-10 raises ``ArithmeticError``.
    """
    j = check_joint(j)
    _check_base(base)
    pb = j.sum(axis=0)
    by_difference = entropy_of(j, base) - entropy_of(pb, base)
    mask = j > 0
    cond = (j / np.where(pb > 0, pb, 1.0)[None, :])[mask]
    direct = _to_base(float(-np.sum(j[mask] * np.log(cond))), base)
    if abs(by_difference - direct) > SLACK:
        raise ArithmeticError(f"conditional entropy formulas disagree: {by_difference!r} vs {direct!r}")
    return direct


def relative_entropy(x, y, base: str = "bits") -> float:
    """``D(x || y)``; ``inf`` when ``x`` puts mass where ``y`` has none."""
    x = check_distribution(x)
    y = check_distribution(y)
    if x.size != y.size:
        raise ValueError("distributions must have equal length")
    _check_base(base)
    mask = x > 0
    if np.any(y[mask] == 0):
        return math.inf
    value = float(np.sum(x[mask] * (np.log(x[mask]) - np.log(y[mask]))))
    return max(_to_base(value, base), 0.0)


def sanov_bound(x, y, n_obs: int) -> float:
    """Leading-order probability that ``n_obs`` draws from ``x`` look like ``y``.

    ``2 ** (-n_obs * D(y || x))`` with the divergence in bits.
    """
    if int(n_obs) != n_obs or n_obs < 1:
        raise ValueError("number of observations must be a positive integer")
    d = relative_entropy(y, x, "bits")
    if math.isinf(d):
        return 0.0
    return float(2.0 ** (-n_obs * d))


@dataclass(frozen=True)
class MarkovTriple:
    p_a: np.ndarray
    k_ab: np.ndarray
    k_bc: np.ndarray

    def __post_init__(self):
        p_a = check_distribution(self.p_a)
        k_ab = check_kernel(self.k_ab)
        k_bc = check_kernel(self.k_bc)
        if k_ab.shape[0] != p_a.size or k_bc.shape[0] != k_ab.shape[1]:
            raise ValueError("Markov chain dimensions do not line up")
        object.__setattr__(self, "p_a", p_a)
        object.__setattr__(self, "k_ab", k_ab)
        object.__setattr__(self, "k_bc", k_bc)

    def joint_ab(self) -> np.ndarray:
        return self.p_a[:, None] * self.k_ab

    def joint_ac(self) -> np.ndarray:
        return self.p_a[:, None] * (self.k_ab @ self.k_bc)

    def joint_bc(self) -> np.ndarray:
        return self.joint_ab().sum(axis=0)[:, None] * self.k_bc


@dataclass(frozen=True)
class MarkovReport:
    h_a: float
    i_ab: float
    i_ac: float
    i_cb: float
    i_ca: float
    a_covers_ab: bool
    ab_covers_ac: bool
    cb_covers_ca: bool

    @property
    def ok(self) -> bool:
        return self.a_covers_ab and self.ab_covers_ac and self.cb_covers_ca


def markov_information_check(m: MarkovTriple, base: str = "bits") -> MarkovReport:
    """Data-processing inequalities for a chain ``A -> B -> C``.

    ``H(A) >= H(A:B) >= H(A:C)`` and ``H(C:B) >= H(C:A)``, each with 1e-10
    slack.
    """
    h_a = entropy_of(m.p_a, base)
    i_ab = mutual_entropy(m.joint_ab(), base)
    i_ac = mutual_entropy(m.joint_ac(), base)
    i_cb = mutual_entropy(m.joint_bc().T, base)
    i_ca = mutual_entropy(m.joint_ac().T, base)
    return MarkovReport(
        h_a=h_a,
        i_ab=i_ab,
        i_ac=i_ac,
        i_cb=i_cb,
        i_ca=i_ca,
        a_covers_ab=h_a >= i_ab - SLACK,
        ab_covers_ac=i_ab >= i_ac - SLACK,
        cb_covers_ca=i_cb >= i_ca - SLACK,
    )


def conditioning_pair(j3, base: str = "bits") -> tuple[float, float]:
    """``(H(A|B,C), H(A|B))`` for a joint over axes ``(A, B, C)``."""
    j3 = np.asarray(j3, dtype=float)
    if j3.ndim != 3:
        raise ValueError("expected a three-way joint distribution")
    h_a_given_bc = conditional_entropy(j3.reshape(j3.shape[0], -1), base)
    h_a_given_b = conditional_entropy(j3.sum(axis=2), base)
    return h_a_given_bc, h_a_given_b


@dataclass(frozen=True)
class BipartiteDensity:
    rho: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        rho = check_density(self.rho)
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 2 or min(dims) < 1 or dims[0] * dims[1] != rho.shape[0]:
            raise ValueError(f"dims {self.dims} do not match a {rho.shape[0]}-dimensional state")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "dims", dims)


def partial_trace(b: BipartiteDensity, keep: str = "A") -> np.ndarray:
    na, nb = b.dims
    r = b.rho.reshape(na, nb, na, nb)
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    if keep == "B":
        return np.einsum("ijil->jl", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def _vn(rho, base: str) -> float:
    return _to_base(float(_entropy_from_eigs(np.linalg.eigvalsh(rho))), base)


@dataclass(frozen=True)
class QuantumConditional:
    value: float
    entangled_witness: bool

    def __float__(self) -> float:
        return self.value


def quantum_conditional_entropy(b: BipartiteDensity, base: str = "bits") -> QuantumConditional:
    """``S(A|B) = S(AB) - S(B)``; negative values witness entanglement."""
    value = _vn(b.rho, base) - _vn(partial_trace(b, "B"), base)
    return QuantumConditional(value=value, entangled_witness=value < -SLACK)


def quantum_mutual_information(b: BipartiteDensity, base: str = "bits") -> float:
    return _vn(partial_trace(b, "A"), base) + _vn(partial_trace(b, "B"), base) - _vn(b.rho, base)


def mixing_entropy_check(parts, p, base: str = "nats") -> tuple[float, float]:
    """``(S(sum p_i rho_i), sum p_i S(rho_i))``; concavity makes the first larger."""
    parts = [check_density(r) for r in parts]
    p = check_distribution(p)
    if len(parts) != p.size:
        raise ValueError("need one weight per state")
    if len({r.shape for r in parts}) != 1:
        raise ValueError("all states must have the same dimension")
    mix = sum(w * r for w, r in zip(p, parts))
    s_mix = _vn(mix, base)
    s_avg = float(sum(w * _vn(r, base) for w, r in zip(p, parts)))
    return s_mix, s_avg
