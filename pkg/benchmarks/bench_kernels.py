"""Time the compiled kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py [--repeat R]``.  Both
backends are called on identical inputs; the script also reports the
largest difference between their outputs.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from wienerhopf import kernels
from wienerhopf.generate import instance_from_seed
from wienerhopf.riccati import ITERATE_MAX, ITERATE_STEP
from wienerhopf.toeplitz import coefficient_sequence


def _riccati_case(dims, seed=0):
    rep = instance_from_seed(seed, dims)
    args = (rep.delta, rep.gamma_plus, rep.alpha_plus, rep.beta_plus, rep.gamma_minus,
            rep.alpha_minus, rep.beta_minus, np.zeros((rep.p_minus, rep.p_plus), np.complex128),
            ITERATE_MAX, ITERATE_STEP)
    return f"riccati_iterate dims={dims}", "riccati_iterate", args


def _toeplitz_case(m, N, seed=0):
    rep = instance_from_seed(seed, (2, 2, m))
    return f"block_toeplitz m={m} N={N}", "block_toeplitz", (coefficient_sequence(rep, N), N)


def _diff(a, b) -> float:
    a = a[0] if isinstance(a, tuple) else a
    b = b[0] if isinstance(b, tuple) else b
    return float(np.max(np.abs(a - b))) if np.size(a) else 0.0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    if not kernels.compiled_available():
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
        return 1
    py, cy = kernels.get_backend("python"), kernels.get_backend("cython")
    cases = [_riccati_case((2, 2, 2)), _riccati_case((6, 6, 4)), _riccati_case((16, 16, 8)),
             _toeplitz_case(2, 64), _toeplitz_case(4, 256), _toeplitz_case(8, 512)]

    print(f"{'case':34s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s} {'max diff':>10s}")
    for label, name, fargs in cases:
        times = {}
        outs = {}
        for tag, mod in (("python", py), ("cython", cy)):
            fn = getattr(mod, name)
            outs[tag] = fn(*fargs)
            n = max(1, int(0.2 / max(timeit.timeit(lambda: fn(*fargs), number=1), 1e-6)))
            times[tag] = min(timeit.repeat(lambda: fn(*fargs), number=n, repeat=args.repeat)) / n
        print(f"{label:34s} {1e3 * times['python']:12.4f} {1e3 * times['cython']:12.4f} "
              f"{times['python'] / times['cython']:8.2f} {_diff(outs['python'], outs['cython']):10.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
