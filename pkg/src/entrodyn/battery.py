"""Seeded random instances for the information-inequality demos."""
from __future__ import annotations

import numpy as np

from .classical import entropy_of
from .infotheory import (
    SLACK,
    BipartiteDensity,
    MarkovTriple,
    conditioning_pair,
    joint_entropy,
    markov_information_check,
    mixing_entropy_check,
    mutual_entropy,
    quantum_conditional_entropy,
    relative_entropy,
)

CHECKS = (
    "subadditivity",
    "conditioning_reduces_entropy",
    "mutual_information_identity",
    "markov_a_ab_ac",
    "markov_cb_ca",
    "relative_entropy_nonnegative",
    "mixture_concavity",
)


def random_joint(rng, shape) -> np.ndarray:
    j = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
    return j / j.sum()


def random_kernel(rng, n, m) -> np.ndarray:
    return rng.dirichlet(np.ones(m), size=n)


def random_density(rng, n, rank=None) -> np.ndarray:
    rank = n if rank is None else rank
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_pure(rng, n) -> np.ndarray:
    return random_density(rng, n, rank=1)


def bell_state() -> BipartiteDensity:
    psi = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
    return BipartiteDensity(np.outer(psi, psi), (2, 2))


def run_battery(rng, instances: int, base: str = "bits") -> tuple[list[dict], dict]:
    """Evaluate every inequality on ``instances`` random cases.

    Returns one row of measured quantities per instance and the overall
    pass flag of each check.
    """
    rows = []
    flags = dict.fromkeys(CHECKS, True)
    for k in range(instances):
        n, m, l = (int(v) for v in rng.integers(2, 5, size=3))
        j = random_joint(rng, (n, m))
        h_ab = joint_entropy(j, base)
        h_a = entropy_of(j.sum(axis=1), base)
        h_b = entropy_of(j.sum(axis=0), base)
        i_ab = mutual_entropy(j, base)

        j3 = random_joint(rng, (n, m, l))
        h_a_bc, h_a_b = conditioning_pair(j3, base)

        chain = MarkovTriple(rng.dirichlet(np.ones(n)), random_kernel(rng, n, m), random_kernel(rng, m, l))
        mk = markov_information_check(chain, base)

        x, y = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        d_xy = relative_entropy(x, y, base)

        parts = [random_density(rng, n) if rng.random() < 0.5 else random_pure(rng, n) for _ in range(m)]
        s_mix, s_avg = mixing_entropy_check(parts, rng.dirichlet(np.ones(m)), "nats")

        row = {
            "instance": k,
            "H_A": h_a,
            "H_B": h_b,
            "H_AB": h_ab,
            "I_AB": i_ab,
            "H_A_given_BC": h_a_bc,
            "H_A_given_B": h_a_b,
            "markov_H_A": mk.h_a,
            "markov_I_AB": mk.i_ab,
            "markov_I_AC": mk.i_ac,
            "markov_I_CB": mk.i_cb,
            "markov_I_CA": mk.i_ca,
            "D_xy": d_xy,
            "S_mix": s_mix,
            "S_avg": s_avg,
        }
        rows.append(row)
        flags["subadditivity"] &= h_ab <= h_a + h_b + SLACK
        flags["conditioning_reduces_entropy"] &= h_a_bc <= h_a_b + SLACK
        flags["mutual_information_identity"] &= abs(i_ab - (h_a + h_b - h_ab)) <= SLACK
        flags["markov_a_ab_ac"] &= mk.a_covers_ab and mk.ab_covers_ac
        flags["markov_cb_ca"] &= mk.cb_covers_ca
        flags["relative_entropy_nonnegative"] &= d_xy >= -SLACK
        flags["mixture_concavity"] &= s_mix >= s_avg - SLACK
    return rows, flags


def entanglement_demo(base: str = "bits") -> dict:
    """Conditional entropies of a Bell, a product and a classically correlated state."""
    product = BipartiteDensity(np.kron(np.eye(2) / 2, np.eye(2) / 2), (2, 2))
    classical = BipartiteDensity(np.diag([0.5, 0.0, 0.0, 0.5]), (2, 2))
    out = {}
    for label, state in (("bell", bell_state()), ("product", product), ("classical", classical)):
        qc = quantum_conditional_entropy(state, base)
        out[label] = qc
    return out
