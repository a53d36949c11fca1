"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 3] [--steps 10000] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from entrodyn import _pykernels

try:
    from entrodyn import _ckernels
except ImportError:
    _ckernels = None


def cases(n, steps, rng):
    a = rng.normal(size=(n, n))
    x = rng.dirichlet(np.ones(n))
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    w, v = np.linalg.eigh(g + g.conj().T)
    u = (v * np.exp(-0.01j * w)) @ v.conj().T
    damp = np.full((n, n), np.exp(-0.005))
    np.fill_diagonal(damp, 1.0)
    return {
        "replicator_field": lambda m: m.replicator_field(a, x),
        "theta_elements": lambda m: m.theta_elements(a, x),
        f"integrate x{steps}": lambda m: m.integrate(a, x, 0.01, steps),
        f"propagate x{steps}": lambda m: m.propagate(rho, u, damp, steps),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=3, help="number of strategies")
    parser.add_argument("--steps", type=int, default=10_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _ckernels is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")

    rng = np.random.default_rng(0)
    print(f"n={args.n}  (best of {args.repeat})")
    print(f"{'kernel':<22}{'numpy [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, call in cases(args.n, args.steps, rng).items():
        times = {}
        for label, mod in (("py", _pykernels), ("c", _ckernels)):
            timer = timeit.Timer(lambda: call(mod))
            loops, _ = timer.autorange()
            times[label] = min(timer.repeat(args.repeat, loops)) / loops
        print(f"{name:<22}{times['py']:>12.3g}{times['c']:>12.3g}{times['py'] / times['c']:>9.1f}x")


if __name__ == "__main__":
    main()
