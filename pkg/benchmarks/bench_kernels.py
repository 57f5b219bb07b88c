"""Compare the compiled and pure-Python lattice kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from slicetheta import kernels
from slicetheta.lattice import Lattice

CASES = [
    ("Z2", Lattice.integer(2), 400.0),
    ("Z4", Lattice.integer(4), 36.0),
    ("D4", Lattice.checkerboard(4), 36.0),
    ("Z8", Lattice.integer(8), 8.0),
]


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["python"] + (["compiled"] if kernels.HAVE_COMPILED else [])
    if not kernels.HAVE_COMPILED:
        print("compiled kernels not built; timing the fallback only")

    print(f"{'case':<6}{'kernel':<20}{'points':>9}" + "".join(f"{b:>13}" for b in backends) + f"{'speedup':>10}")
    for name, L, r2 in CASES:
        R = np.linalg.cholesky(L.gram).T
        coords = L.point_set(r2).coords
        a = complex(-0.9, 2.1)
        shift = np.full(L.dim, 0.1 + 0.05j)
        lin = np.full(L.dim, 0.3j)
        jobs = {
            "ball_coefficients": lambda b: kernels.ball_coefficients(R, r2, 1e-9, backend=b),
            "exp_sum": lambda b: kernels.exp_sum(coords, a, shift, lin, backend=b),
        }
        for kernel, job in jobs.items():
            times = [best_of(lambda: job(b), args.repeat) for b in backends]
            speed = f"{times[0] / times[1]:>9.1f}x" if len(times) == 2 else ""
            cells = "".join(f"{t * 1e3:>11.2f}ms" for t in times)
            print(f"{name:<6}{kernel:<20}{len(coords):>9}{cells}{speed}")


if __name__ == "__main__":
    main()
