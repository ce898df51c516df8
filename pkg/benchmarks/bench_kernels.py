"""Compare the compiled and numpy implementations of the mixture-scan kernel.

Usage: python3 benchmarks/bench_kernels.py [--sizes 100 200 400] [--grid 101] [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from chdl import _kernels_py

try:
    from chdl import _kernels
except ImportError:  # extension not built
    _kernels = None


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400, 800])
    ap.add_argument("--grid", type=int, default=101)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    p = np.linspace(0.0, 1.0, args.grid)
    backends = {"python": _kernels_py.best_mixture}
    if _kernels is not None:
        backends["cython"] = _kernels.best_mixture
    print(f"{'candidates':>10} " + " ".join(f"{name + ' [s]':>12}" for name in backends) + f" {'speedup':>8}")
    for n in args.sizes:
        a, h = rng.normal(size=n), rng.uniform(0.0, 3.0, size=n)
        times, results = {}, {}
        for name, fn in backends.items():
            results[name] = fn(a, h, 1.0, p)
            times[name] = min(timeit.repeat(lambda: fn(a, h, 1.0, p), number=1, repeat=args.repeat))
        if len(results) == 2:
            assert abs(results["python"][0] - results["cython"][0]) <= 1e-12, results
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{n:>10} " + " ".join(f"{times[k]:>12.4f}" for k in backends) + f" {speed:>8.1f}")


if __name__ == "__main__":
    main()
