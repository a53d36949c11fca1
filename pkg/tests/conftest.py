import numpy as np
import pytest
from scipy.integrate import solve_ivp

PD = np.array([[3.0, 0.0], [5.0, 1.0]])
RPS = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_game(rng, n=None):
    n = int(rng.integers(2, 7)) if n is None else n
    return rng.normal(size=(n, n)), rng.dirichlet(np.ones(n))


# one invalid value per scenario field
CORRUPT = {
    "kind": "chemistry",
    "name": 17,
    "outputs": [1],
    "entropy_base": "decibans",
    "seed": -1,
    "game": "missing.txt",
    "initial": [0.9, 0.9, 0.9],
    "t_end": -1,
    "dt": "fast",
    "nash_tol": 0,
    "mode": "squeezed",
    "gamma": -1,
    "hbar": 0,
    "joint": [[0.5, 0.6]],
    "instances": 0,
    "spectrum": "nope.txt",
    "beta": "hot",
    "target_mean_energy": 1e9,
    "trials": 0,
    "scan": [5, -5, 3],
}


def flow(a, x, t):
    """Replicator flow by an independent high-order integrator (t may be negative)."""
    if t == 0:
        return np.asarray(x, dtype=float)

    def rhs(_, y):
        f = a @ y
        return (f - y @ f) * y

    sol = solve_ivp(rhs, (0.0, t), x, method="DOP853", rtol=1e-13, atol=1e-15)
    return sol.y[:, -1]


def fd_entropy_rate(a, x, h=1e-5):
    def H(y):
        y = y[y > 0]
        return -np.sum(y * np.log(y))

    return (H(flow(a, x, h)) - H(flow(a, x, -h))) / (2 * h)


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))
    elif report.when == "setup" and report.failed and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], "error"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
