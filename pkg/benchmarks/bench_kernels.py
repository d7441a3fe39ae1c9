"""Time the compiled kernel core against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeats 5] [--M 2001]

Both backends are imported directly (bypassing the import-time switch) so
one process can time them side by side.
"""

import argparse
import time

import numpy as np

from sphbath._kernels import _fallback

try:
    from sphbath._kernels import _core
except ImportError:
    _core = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(impl, M):
    rng = np.random.default_rng(11)
    gaps = rng.uniform(1e-3, 5.0, M)
    weights = rng.uniform(0.5, 2.0, M)
    ts = np.geomspace(1e-3, 1e3, 400)
    A = rng.uniform(1e-6, 10.0, 20000)
    return [
        ("s_sum(1, M)", lambda: impl.s_sum(1, M)),
        ("s_table_half(M)", lambda: impl.s_table_half(M)),
        ("kappa_box_many(20k)", lambda: impl.kappa_box_many(A, 2.0, 0.2)),
        ("mode_decay_sum(400xM)",
         lambda: impl.mode_decay_sum(ts, gaps, weights)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--M", type=int, default=2001,
                    help="kernel size (odd slice count scale)")
    args = ap.parse_args()

    if _core is None:
        print("compiled core not built; timing fallback only")
    print(f"{'kernel':<24} {'python':>12} {'cython':>12} {'speedup':>9}")
    for (name, py_fn), core_case in zip(
            cases(_fallback, args.M),
            cases(_core, args.M) if _core else cases(_fallback, args.M)):
        t_py = best_of(py_fn, args.repeats)
        if _core is None:
            print(f"{name:<24} {t_py * 1e3:>10.3f} ms {'-':>12} {'-':>9}")
            continue
        t_cy = best_of(core_case[1], args.repeats)
        print(f"{name:<24} {t_py * 1e3:>10.3f} ms {t_cy * 1e3:>9.3f} ms "
              f"{t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    main()
