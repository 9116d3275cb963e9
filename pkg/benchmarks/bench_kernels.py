"""Compare the compiled and numpy kernels on growing configurations.

    python benchmarks/bench_kernels.py [--levels 10 40 160] [--width 4] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from planarends.kernels import available_backends
from planarends.verify import random_configuration


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--levels", type=int, nargs="+", default=[10, 40, 160])
    ap.add_argument("--width", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = available_backends()
    rng = np.random.default_rng(args.seed)
    print("%-8s %-16s %s" % ("levels", "kernel", "  ".join("%12s" % b for b in backends)))
    for L in args.levels:
        sizes = tuple(rng.integers(1, args.width + 1, size=L))
        cfg = random_configuration(sizes, rng, spread=2.0)
        pts, ptr = cfg.flat()
        X = (rng.normal(size=20000) + 1j * rng.normal(size=20000)) * 3
        # two weights, as on a sheet between two neck levels
        w = np.where(np.arange(len(pts)) % 2, 0.5, -1.0 / 3.0)
        for name, call in (
            ("force_sums", lambda m: m.force_sums(pts, ptr)),
            ("force_jacobian", lambda m: m.force_jacobian(pts, ptr)),
            ("log_potential", lambda m: m.log_potential(X, pts, w)),
        ):
            times = [bench(lambda m=m: call(m), args.repeat) for m in backends.values()]
            print("%-8d %-16s %s" % (L, name, "  ".join("%10.3f ms" % (1e3 * t) for t in times)))


if __name__ == "__main__":
    main()
