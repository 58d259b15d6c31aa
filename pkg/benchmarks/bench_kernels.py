"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import math
import timeit

import numpy as np

from fraczeta import _pykernels, kernels

try:
    from fraczeta import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases():
    n = 200_000
    logs = -np.log(3.0) * np.arange(1, n + 1) / 1000.0
    mults = np.ones(n)
    lc = kernels.log_binomials(1, 2, 100_000, impl=_pykernels)
    return {
        "dirichlet_sum (2e5 terms)": lambda impl: kernels.dirichlet_sum(logs, mults, 0.8 + 3j, impl=impl),
        "log_binomials (1e5 terms)": lambda impl: kernels.log_binomials(1, 2, 100_000, impl=impl),
        "partition_log_sum (1e5 terms)": lambda impl: kernels.partition_log_sum(lc, 2, 0.63, math.log(3), impl=impl),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':34s}" + "".join(f"{n:>12s}" for n, _ in impls) + f"{'speedup':>10s}")
    for name, fn in cases().items():
        times = [min(timeit.repeat(lambda: fn(impl), number=1, repeat=args.repeat)) for _, impl in impls]
        speed = f"{times[0] / times[1]:9.1f}x" if len(times) > 1 else "        -"
        print(f"{name:34s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
