"""Compare the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is timed on both paths with identical inputs (numba is compiled
once before timing).  The end-to-end row times a bootstrap standard-error
computation at p=10, N=1000, r=500, B=100 with the kernel module patched to
each path in turn.
"""
import argparse
import time

import numpy as np

from levinfer import _kernels
from levinfer.bootstrap import BootstrapConfig, bootstrap_sd
from levinfer.data_model import Dataset
from levinfer.leverage import make_plan, sketched_leverage
from levinfer.simulation import gen_beta, gen_design, gen_response

NAMES = ("alias_build", "alias_draw", "count_draws", "weighted_gram")


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def use_path(suffix):
    for name in NAMES:
        setattr(_kernels, name, getattr(_kernels, f"{name}_{suffix}"))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(0)
    N, r, p = 100_000, 50_000, 10
    prob = rng.random(N) + 0.01
    prob /= prob.sum()
    accept, alias = _kernels.alias_build_np(prob)
    cols, u = rng.integers(0, N, r), rng.random(r)
    draws = _kernels.alias_draw_np(accept, alias, cols, u)
    rows, w = rng.standard_normal((r, p)), rng.random(r)

    cases = {
        "alias_build": (prob,),
        "alias_draw": (accept, alias, cols, u),
        "count_draws": (draws, N),
        "weighted_gram": (rows, w),
    }
    print(f"{'kernel':<16}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, inputs in cases.items():
        f_np = getattr(_kernels, f"{name}_np")
        f_nb = getattr(_kernels, f"{name}_nb")
        f_nb(*inputs)  # compile
        t_np = best_of(lambda: f_np(*inputs), args.repeat)
        t_nb = best_of(lambda: f_nb(*inputs), args.repeat)
        print(f"{name:<16}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.1f}")

    X = gen_design(1000, 10, seed=1)
    ds = Dataset(X, gen_response(X, gen_beta(10, seed=1), 9.0, seed=1))
    plan = make_plan(sketched_leverage(X, 200, seed=1), 0.01)
    cfg = BootstrapConfig(B=100, r=500, seed=3)
    saved = {name: getattr(_kernels, name) for name in NAMES}
    try:
        timings = {}
        for suffix in ("np", "nb"):
            use_path(suffix)
            bootstrap_sd(ds, plan, cfg)
            timings[suffix] = best_of(lambda: bootstrap_sd(ds, plan, cfg), max(1, args.repeat // 2))
    finally:
        for name, fn in saved.items():
            setattr(_kernels, name, fn)
    print(f"{'bootstrap B=100':<16}{1e3 * timings['np']:>12.1f}{1e3 * timings['nb']:>12.1f}"
          f"{timings['np'] / timings['nb']:>10.1f}")


if __name__ == "__main__":
    main()
