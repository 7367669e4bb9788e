"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--sizes 8 10 12] [--repeats 3]

Prints one line per (kernel, ground-set size) with the best wall time of
each backend and the speed-up. Both backends must return identical results;
a mismatch aborts the run.
"""

import argparse
import sys
import time

import numpy as np

from pmsearch import kernels


def best_time(fn, repeats):
    best, out = float("inf"), None
    for _ in range(repeats):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[8, 10, 12])
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    if "cython" not in kernels.BACKENDS:
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<22}{'n':>4}{'python s':>12}{'cython s':>12}{'speed-up':>10}")
    for n in args.sizes:
        table = rng.random(1 << n)
        full = (1 << n) - 1
        # values lie in [0, 1], so a tolerance of 3 never fires and the scans run to the end
        jobs = {
            "smi(L=V, k=2)": lambda b: kernels.smi(table, n, full, 2, backend=b),
            "submodular_violation": lambda b: kernels.submodular_violation(table, n, 3.0, backend=b),
            "monotone_violation": lambda b: kernels.monotone_violation(table, n, 3.0, backend=b),
        }
        for name, job in jobs.items():
            tp, rp = best_time(lambda: job("python"), args.repeats)
            tc, rc = best_time(lambda: job("cython"), args.repeats)
            if (rp is None) != (rc is None) or (rp is not None and tuple(rp) != tuple(rc)):
                print(f"backends disagree on {name} at n={n}: {rp} vs {rc}", file=sys.stderr)
                return 2
            print(f"{name:<22}{n:>4}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.0f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
