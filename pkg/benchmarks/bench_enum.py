"""Compare the compiled and pure-Python short-vector kernels.

    python benchmarks/bench_enum.py [--repeat N]
"""
import argparse
import time

import numpy as np

from hermtheta import _core
from hermtheta.enumeration import short_vectors
from hermtheta.hlattice import hnk_lattice
from hermtheta.qfield import make_field

E8 = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, -1],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, -1, 0, 0, 0, 0, 2],
]

CASES = [
    ("E8, norm <= 4", E8, 4),
    ("E8, norm <= 6", E8, 6),
    ("E8, norm <= 10", E8, 10),
    ("m=30 trace form, norm <= 6", None, 6),
    ("m=30 trace form, norm <= 10", None, 10),
]


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _core._compiled is None:
        print("compiled kernels unavailable; only the Python backend can run")
        return
    print(f"{'case':32} {'vectors':>8} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for name, S, bound in CASES:
        if S is None:
            S = hnk_lattice(make_field(30)).int_gram
        tp, vp = best_of(lambda: short_vectors(S, bound, backend="python"), args.repeat)
        tc, vc = best_of(lambda: short_vectors(S, bound, backend="compiled"), args.repeat)
        assert np.array_equal(vp.array, vc.array)
        print(f"{name:32} {len(vc):8d} {tp:10.4f} {tc:11.4f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
