"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--n 1000000] [--repeat 7] [--end-to-end]

Kernel timings take the best of ``--repeat`` calls after one warm-up call
(which also triggers JIT compilation). ``--end-to-end`` additionally times
a joint fit plus a goodness-of-fit run in fresh interpreters with and
without QGMARKET_DISABLE_NUMBA.
"""

import argparse
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from qgmarket import _kernels as k
from qgmarket.distribution import QGaussianParams, cdf
from qgmarket.sampling import SeededStream, sample_q_gaussian

E2E = """
import time
from qgmarket import backend, estimate_q_beta, QGaussianParams
from qgmarket.gof import goodness_of_fit
from qgmarket.sampling import SeededStream, sample_q_gaussian
x = sample_q_gaussian(QGaussianParams(1.5, 1.0), {n}, SeededStream(1))
t0 = time.perf_counter()
r = estimate_q_beta(x)
goodness_of_fit(x, r.params, SeededStream(2))
print(backend(), time.perf_counter() - t0)
"""


def best(fn, repeat):
    fn()
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def cases(n):
    p = QGaussianParams(1.5, 1.0)
    x = sample_q_gaussian(p, n, SeededStream(1))
    y = sample_q_gaussian(p, n, SeededStream(2))
    x2 = x * x
    a, b = np.sort(x), np.sort(y)
    fa = np.asarray(cdf(a, p))
    rng = np.random.default_rng(3)
    u1, u2 = 1.0 - rng.random(n), rng.random(n)
    qp = (1 + 1.5) / (3 - 1.5)
    return {
        "kappa_moments": lambda f: f(x2, 0.5),
        "kappa_fraction": lambda f: f(x2, 0.5),
        "score_products": lambda f: f(x2, 2.0, 0.5, 0.8),
        "ks_sorted": lambda f: f(a, b),
        "closeness_count": lambda f: f(a, b, fa),
        "box_muller": lambda f: f(u1, u2, qp),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args(argv)

    if not k.HAVE_NUMBA:
        sys.exit("numba is not installed; nothing to compare")
    print(f"n = {args.n:,}, best of {args.repeat}")
    print(f"{'kernel':<16} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for name, call in cases(args.n).items():
        t_np = best(lambda: call(getattr(k, name + "_np")), args.repeat)
        t_nb = best(lambda: call(getattr(k, name + "_nb")), args.repeat)
        print(f"{name:<16} {1e3 * t_np:10.2f} {1e3 * t_nb:10.2f} {t_np / t_nb:7.1f}x")

    if args.end_to_end:
        print("\nfit + gof, fresh interpreter (includes numba cache load)")
        for flag in ("0", "1"):
            env = dict(os.environ, QGMARKET_DISABLE_NUMBA=flag)
            t0 = time.perf_counter()
            out = subprocess.run([sys.executable, "-c", E2E.format(n=args.n)], env=env,
                                 capture_output=True, text=True, check=True).stdout.split()
            wall = time.perf_counter() - t0
            print(f"{out[0]:<8} work {float(out[1]):6.2f} s   process {wall:6.2f} s")


if __name__ == "__main__":
    main()
