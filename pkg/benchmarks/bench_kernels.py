"""Compare the compiled and numpy kernels on the TID kernel workload.

Usage::

    python benchmarks/bench_kernels.py [--size 100000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from etstable import _kernels_py
from etstable.charfn import psi_coefficients

try:
    from etstable import _kernels
except ImportError:
    _kernels = None


def workload(size: int, seed: int = 0):
    s = np.random.default_rng(seed).uniform(-20.0, 20.0, size)
    return s


def bench(mod, s, alpha, repeat):
    c_re, c_im = psi_coefficients(alpha)
    fn = lambda: mod.psi_kernel(s, alpha, c_re, c_im, True)
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    return best, fn()


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=100_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    s = workload(args.size)
    print(f"psi kernel, {args.size} points, best of {args.repeat}")
    for alpha in (0.5, 1.5):
        t_py, v_py = bench(_kernels_py, s, alpha, args.repeat)
        line = f"alpha={alpha}: python {t_py * 1e3:8.2f} ms"
        if _kernels is not None:
            t_cy, v_cy = bench(_kernels, s, alpha, args.repeat)
            diff = float(np.max(np.abs(v_cy - v_py) / np.maximum(np.abs(v_py), 1e-300)))
            line += f" | cython {t_cy * 1e3:8.2f} ms | speedup {t_py / t_cy:6.1f}x | max rel diff {diff:.1e}"
        else:
            line += " | cython extension not built"
        print(line)


if __name__ == "__main__":
    main()
