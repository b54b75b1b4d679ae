"""Timing comparison of the compiled kernels against the numpy fallback.

Both backends are imported directly (the compiled one only if the extension
built), so a single run covers both; ERGOKIT_PURE is not needed here.  Times
are medians over repeats of the best-of-inner-loop, which is stable enough
for a 2-5x ballpark answer.

Expect a crossover on mc_max_ratio: the scalar loops win in the regime the
package actually hits (state dimension below ~10, sample counts in the tens
of thousands, no (m, n) temporaries), while BLAS-backed numpy pulls ahead
as the dimension grows past that.

Run from the repo root:

    python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from ergokit import BACKEND
from ergokit import _kernels_py

try:
    from ergokit import _kernels as _compiled
except ImportError:
    _compiled = None


def _time(fn, args, repeats=5, inner=3):
    best = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best.append((time.perf_counter() - t0) / inner)
    return float(np.median(best))


def _mc_inputs(n, m, rng):
    T = rng.dirichlet(np.ones(n), size=n).T
    P = np.full((n, n), 1.0 / n)
    K = np.eye(n) - P
    Z = rng.standard_normal((m, n))
    return (T @ K, K, Z)


def _pair_inputs(k, n, rng):
    return (rng.standard_normal((k, n)),)


def main():
    rng = np.random.default_rng(7)
    print(f"active package backend: {BACKEND}")
    if _compiled is None:
        print("compiled extension not built; timing the fallback only")
    print()

    header = f"{'kernel':<26} {'size':<14} {'python':>10} {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))

    cases = [
        ("mc_max_ratio", _mc_inputs, [(6, 100_000), (10, 100_000), (50, 100_000), (200, 20_000)]),
        ("max_pair_half_l1", _pair_inputs, [(50, 50), (300, 300), (1000, 200)]),
    ]
    for name, make, sizes in cases:
        for size in sizes:
            args = make(*size, rng)
            t_py = _time(getattr(_kernels_py, name), args)
            if _compiled is not None:
                t_c = _time(getattr(_compiled, name), args)
                ratio = t_py / t_c if t_c > 0 else float("inf")
                print(
                    f"{name:<26} {str(size):<14} {t_py * 1e3:>8.2f}ms {t_c * 1e3:>8.2f}ms {ratio:>7.1f}x"
                )
            else:
                print(f"{name:<26} {str(size):<14} {t_py * 1e3:>8.2f}ms {'-':>10} {'-':>8}")

    if _compiled is not None:
        print()
        print("agreement spot check:")
        for name, make, sizes in cases:
            args = make(*sizes[0], rng)
            a = getattr(_kernels_py, name)(*args)
            b = getattr(_compiled, name)(*args)
            ok = np.allclose(a[0], b[0], rtol=0, atol=1e-12) and a[1:] == b[1:]
            print(f"  {name}: {'match' if ok else 'MISMATCH'} ({a} vs {b})")


if __name__ == "__main__":
    main()
