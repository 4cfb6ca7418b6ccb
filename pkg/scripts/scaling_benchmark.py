"""Per-cycle and per-path timings as the number of groups grows (n fixed).

    python3 scripts/scaling_benchmark.py --n 1000 --p 200 500 1000 2000
"""
import argparse
import time

import numpy as np

from grpdesc import GroupedDesign, PenaltySpec, fit_path, orthonormalize
from grpdesc import _kernels as K
from grpdesc.path import lambda_max


def design(n, p, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    y = X[:, :20] @ rng.choice([-1.0, 1.0], 20) + rng.standard_normal(n)
    return GroupedDesign.from_arrays(X, y, np.repeat(np.arange(p // 4), 4))


def cycle_time(d, reps=51):
    ortho, tr = orthonormalize(d)
    spec = PenaltySpec().resolve(ortho)
    thr = spec.thresholds(0.5 * lambda_max(ortho, tr, spec)[0])
    order = np.arange(ortho.J, dtype=np.int64)
    best = np.inf
    for _ in range(reps):
        beta, r = np.zeros(ortho.p), ortho.y.copy()
        t0 = time.perf_counter()
        K.linear_fit(ortho.X, ortho.y, r, beta, ortho.starts, thr, spec.gamma, spec.code, 0.0, 1, order,
                     np.empty(0))
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--p", type=int, nargs="+", default=[200, 500, 1000, 2000])
    args = ap.parse_args()
    cycle_time(design(50, 24))  # compile
    base = None
    print(f"{'p':>6s} {'cycle ms':>9s} {'ratio':>6s} " + " ".join(f"{f:>9s}" for f in ("grlasso", "grmcp", "grscad")))
    for p in args.p:
        d = design(args.n, p)
        c = cycle_time(d)
        base = base or c
        paths = []
        for fam in ("grlasso", "grmcp", "grscad"):
            t0 = time.perf_counter()
            fit_path(d, PenaltySpec(fam))
            paths.append(time.perf_counter() - t0)
        print(f"{p:6d} {c * 1e3:9.3f} {c / base:6.1f} " + " ".join(f"{t:8.2f}s" for t in paths))


if __name__ == "__main__":
    main()
