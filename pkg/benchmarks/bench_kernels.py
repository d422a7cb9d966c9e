"""Compare the compiled and pure-Python iteration kernels.

    python benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""

import argparse
import math
import time

import numpy as np

from qedsat import _kernels_py
from qedsat.amplitudes import amplitude_matrix

try:
    from qedsat import _kernels as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    mats = np.array([amplitude_matrix("bhabha", 0.01, math.pi / 4).entries])
    index = np.zeros(args.steps, np.int64)
    x0 = np.array([0, 1, 0, 0], dtype=complex)

    t_py, out_py = best_of(lambda: _kernels_py.iterate_sequence(mats, index, x0, 1e-300), args.repeat)
    print(f"python  {args.steps:>9d} steps  {t_py:8.3f} s  {args.steps / t_py:12.0f} steps/s")
    if compiled is None:
        print("cython  not built")
        return
    t_cy, out_cy = best_of(lambda: compiled.iterate_sequence(mats, index, x0, 1e-300), args.repeat)
    print(f"cython  {args.steps:>9d} steps  {t_cy:8.3f} s  {args.steps / t_cy:12.0f} steps/s")
    gap = float(np.max(np.abs(out_py[1] - out_cy[1])))
    print(f"speedup {t_py / t_cy:.1f}x, max concurrence difference {gap:.1e}")


if __name__ == "__main__":
    main()
