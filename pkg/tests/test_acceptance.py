"""Acceptance criteria, one test each; every test records a PASS/FAIL line.

Run under pytest (lines are echoed in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from grpdesc import (GroupedDesign, PenaltySpec, fit_linear, fit_logistic, fit_path, firm_mcp, io,
                     objective, orthonormalize)
from grpdesc import _kernels as K
from grpdesc.cli import main
from grpdesc.oracle import brute_minimize, worst_directional_change
from grpdesc.path import lambda_max
from grpdesc.sim import Scenario, oracle_rmse, simulate

RESULTS = []
FAMILIES = (("grlasso", None), ("grmcp", 3.0), ("grscad", 4.0))


def record(number, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] AC{number:<2d} {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def instance(seed, loss, n=None, sizes=None, corr=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(20, 60))
    sizes = sizes or tuple(int(k) for k in rng.integers(1, 5, size=rng.integers(2, 6)))
    p = sum(sizes)
    X = rng.standard_normal((n, p))
    corr = rng.uniform(0, 1.5) if corr is None else corr
    X += corr * rng.standard_normal((n, 1))
    b = rng.normal(0, 1, p) * (rng.random(p) < 0.5)
    eta = X @ b + rng.standard_normal(n)
    if loss == "logistic":
        y = (eta > 0).astype(float)
        y[0], y[1] = 0.0, 1.0
    else:
        y = eta
    design = GroupedDesign.from_arrays(X, y, np.repeat(np.arange(len(sizes)), sizes))
    ortho, tr = orthonormalize(design, loss)
    return design, ortho, tr, rng


def solve(ortho, lam, spec, **kw):
    if spec.loss.value == "logistic":
        s = fit_logistic(ortho, lam, spec, **kw)
        return s, s.beta0
    return fit_linear(ortho, lam, spec, **kw), 0.0


def test_ac1_descent():
    t0 = time.perf_counter()
    worst, count = -np.inf, 0
    for loss in ("linear", "logistic"):
        for fam, gamma in FAMILIES:
            for seed in range(200):
                _, ortho, tr, rng = instance(seed, loss)
                spec = PenaltySpec(fam, gamma, loss=loss).resolve(ortho)
                lam = lambda_max(ortho, tr, spec)[0] * rng.uniform(0.02, 0.9)
                s, _ = solve(ortho, lam, spec, trace=True, tol=1e-9, max_iter=2000)
                worst = max(worst, np.diff(s.objective_trace).max(initial=-np.inf))
                count += 1
    elapsed = time.perf_counter() - t0
    record(1, "descent", worst <= 1e-10 and elapsed < 60,
           f"{count} fits, largest per-cycle increase {worst:.2e} (limit 1e-10), {elapsed:.1f}s (limit 60s)")


def test_ac2_oracle_convex():
    worst = {}
    for loss, rtol in (("linear", 1e-6), ("logistic", 1e-4)):
        rel = []
        for seed in range(50):
            rng = np.random.default_rng(1000 + seed)
            sizes = tuple(int(k) for k in rng.integers(1, 4, size=2))
            _, ortho, tr, rng = instance(1000 + seed, loss, n=20, sizes=sizes)
            spec = PenaltySpec(loss=loss).resolve(ortho)
            lam = lambda_max(ortho, tr, spec)[0] * rng.uniform(0.05, 0.8)
            s, b0 = solve(ortho, lam, spec, tol=1e-12, max_iter=200_000)
            q = objective(ortho, b0, s.beta, lam, spec).value
            ref = brute_minimize(ortho, lam, spec, n_starts=8, seed=seed).objective
            rel.append((q - ref) / abs(ref))
        worst[loss] = (max(rel), rtol)
    ok = all(w <= tol for w, tol in worst.values())
    record(2, "oracle equivalence", ok, ", ".join(
        f"{loss} worst relative gap {w:.1e} (limit {tol:.0e})" for loss, (w, tol) in worst.items()))


def test_ac3_stationarity():
    worst = np.inf
    n = 0
    for loss in ("linear", "logistic"):
        for fam, gamma in FAMILIES[1:]:
            for seed in range(50):
                _, ortho, tr, rng = instance(2000 + seed, loss, n=40)
                spec = PenaltySpec(fam, gamma, loss=loss).resolve(ortho)
                lam = lambda_max(ortho, tr, spec)[0] * rng.uniform(0.05, 0.8)
                s, b0 = solve(ortho, lam, spec, tol=1e-12, max_iter=200_000)
                worst = min(worst, worst_directional_change(ortho, b0, s.beta, lam, spec, n_dirs=20, seed=seed))
                n += 1
    record(3, "stationarity", worst >= -1e-8,
           f"{n} MCP/SCAD fits x 20 directions, most negative change {worst:.2e} (limit -1e-8)")


def test_ac4_limits():
    worst = 0.0
    for seed in range(20):
        design, *_ = instance(3000 + seed, "linear", n=60)
        lasso = fit_path(design, PenaltySpec(), n_lambda=50, tol=1e-12)
        mcp = fit_path(design, PenaltySpec("grmcp", 1e8), n_lambda=50, tol=1e-12)
        worst = max(worst, np.abs(lasso.coefficients - mcp.coefficients).max())
    zs = np.linspace(-5, 5, 20001)
    lam = 1.3
    outside = (np.abs(zs) <= 0.99 * lam) | (np.abs(zs) >= 1.01 * lam)
    hard = np.where(np.abs(zs) > lam, zs, 0.0)
    op_err = max(abs(firm_mcp(z, lam, 1.0001) - h) for z, h in zip(zs[outside], hard[outside]))
    # and through the solver: one orthonormal column, beta = hard threshold of z
    rng = np.random.default_rng(4)
    x = rng.standard_normal((50, 1))
    solver_err = 0.0
    for scale in np.linspace(-3, 3, 61):
        y = scale * x[:, 0] + 0.3 * rng.standard_normal(50)
        ortho, _ = orthonormalize(GroupedDesign.from_arrays(x, y, [0]))
        z = ortho.X[:, 0] @ ortho.y / 50
        if 0.99 * 0.5 < abs(z) < 1.01 * 0.5:
            continue
        b = fit_linear(ortho, 0.5, PenaltySpec("grmcp", 1.0001).resolve(ortho)).beta[0]
        solver_err = max(solver_err, abs(b - (z if abs(z) > 0.5 else 0.0)))
    ok = worst <= 1e-5 and op_err <= 1e-12 and solver_err <= 1e-12
    record(4, "limiting cases", ok, f"gamma=1e8 vs lasso max diff {worst:.1e} (limit 1e-5); "
           f"gamma=1.0001 vs hard threshold: operator {op_err:.1e}, solver {solver_err:.1e}")


def test_ac5_ortho():
    worst, deficient = 0.0, 0
    for seed in range(100):
        rng = np.random.default_rng(4000 + seed)
        n, k = int(rng.integers(5, 80)), int(rng.integers(1, 8))
        rank = int(rng.integers(1, k + 1)) if seed % 2 else k
        X = rng.standard_normal((n, rank)) @ rng.standard_normal((rank, k))
        ortho, tr = orthonormalize(GroupedDesign.from_arrays(X, rng.standard_normal(n), [0] * k))
        r = tr.ranks[0]
        deficient += r < k
        worst = max(worst, np.abs(ortho.X.T @ ortho.X / n - np.eye(r)).max())
    dup = 0.0
    for seed in range(10):
        rng = np.random.default_rng(4500 + seed)
        X = rng.standard_normal((60, 7))
        X[:, 2] = X[:, 0]
        y = X[:, 0] + X[:, 3] + rng.standard_normal(60)
        d = GroupedDesign.from_arrays(X, y, [0, 0, 0, 1, 1, 2, 2])
        for fam, gamma in FAMILIES:
            fit = fit_path(d, PenaltySpec(fam, gamma), n_lambda=40)
            dup = max(dup, np.abs(fit.coefficients[:, 0] - fit.coefficients[:, 2]).max())
    ok = worst <= 1e-10 and dup <= 1e-10 and deficient > 0
    record(5, "orthonormalization", ok, f"100 groups ({deficient} rank-deficient), max |(1/n)X'X - I| "
           f"{worst:.1e} (limit 1e-10); duplicated-column coefficient gap {dup:.1e}")


@pytest.mark.slow
def test_ac6_basic_simulation():
    t0 = time.perf_counter()
    scenario = Scenario("basic", n=100, J=100, K=4, beta=1.0, seed=2024)
    _, summary = simulate(scenario, replicates=100)
    elapsed = time.perf_counter() - t0
    s = {row["method"]: row for row in summary}
    target = oracle_rmse(scenario)
    rm = {m: s[m]["rmse"] for m in s}
    size = {m: s[m]["model_size_groups"] for m in s}
    ok = (rm["grmcp"] <= 0.6 * rm["grlasso"] and rm["grscad"] <= 0.6 * rm["grlasso"]
          and rm["grmcp"] <= 2 * target and rm["grscad"] <= 2 * target
          and size["grmcp"] <= size["grscad"] <= size["grlasso"] and elapsed < 600)
    record(6, "basic simulation", ok,
           "mean RMSE " + ", ".join(f"{m} {v:.4f}" for m, v in rm.items()) + f" (oracle {target:.4f}); "
           "mean groups " + ", ".join(f"{m} {v:.2f}" for m, v in size.items()) + f"; {elapsed:.0f}s (limit 600s)")


def test_ac7_lambda_max():
    bad = 0
    for loss in ("linear", "logistic"):
        for seed in range(100):
            _, ortho, tr, _ = instance(5000 + seed, loss)
            spec = PenaltySpec(loss=loss).resolve(ortho)
            lm = lambda_max(ortho, tr, spec)[0]
            at, _ = solve(ortho, lm, spec, tol=1e-10, max_iter=100_000)
            below, _ = solve(ortho, 0.999 * lm, spec, tol=1e-10, max_iter=100_000)
            bad += at.beta.any() or not below.beta.any()
    record(7, "lambda_max exactness", bad == 0, f"200 instances (100 per loss), {bad} failures")


def test_ac8_saturation():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((30, 60))
    y = (X[:, :3].sum(axis=1) > 0).astype(float)
    d = GroupedDesign.from_arrays(X, y, np.repeat(np.arange(20), 3))
    ok, parts = True, []
    # the lasso grid is extended: at the default floor of 0.05 lambda_max it stops near 93%
    for (fam, gamma), min_ratio in zip(FAMILIES, (1e-3, None, None)):
        fit = fit_path(d, PenaltySpec(fam, gamma, loss="logistic"), n_lambda=100, min_ratio=min_ratio)
        explained = 1 - fit.deviance / fit.null_deviance
        ok &= fit.saturated_at is not None and len(fit) == fit.saturated_at and explained.max() <= 0.99
        parts.append(f"{fam} saturated_at={fit.saturated_at} (kept {len(fit)}, max explained {explained.max():.4f})")
    record(8, "saturation", ok, "; ".join(parts))


def _cycle_time(n, p, reps=51):
    rng = np.random.default_rng(9)
    X = rng.standard_normal((n, p))
    y = X[:, :10].sum(axis=1) + rng.standard_normal(n)
    d = GroupedDesign.from_arrays(X, y, np.repeat(np.arange(p // 4), 4))
    ortho, tr = orthonormalize(d)
    spec = PenaltySpec().resolve(ortho)
    thr = spec.thresholds(0.5 * lambda_max(ortho, tr, spec)[0])
    Xf = np.asfortranarray(ortho.X)
    order = np.arange(ortho.J, dtype=np.int64)
    times = []
    for _ in range(reps):
        beta, r = np.zeros(ortho.p), ortho.y.copy()
        t0 = time.perf_counter()
        K.linear_fit(Xf, ortho.y, r, beta, ortho.starts, thr, spec.gamma, spec.code, 0.0, 1, order,
                     np.empty(0))
        times.append(time.perf_counter() - t0)
    return float(np.min(times))


def test_ac9_scaling():
    _cycle_time(50, 8, reps=2)  # compile
    small, large = _cycle_time(1000, 200), _cycle_time(1000, 2000)
    ratio = large / small
    record(9, "scaling", 5 <= ratio <= 15,
           f"single cycle n=1000: p=200 {small * 1e3:.2f}ms, p=2000 {large * 1e3:.2f}ms, ratio {ratio:.1f} "
           "(accepted 5-15)")


def test_ac10_determinism(tmp_path):
    rng = np.random.default_rng(10)
    X = rng.standard_normal((60, 6))
    y = X[:, 0] - X[:, 1] + rng.standard_normal(60)
    data = tmp_path / "data.csv"
    io.write_table(data, ["y", *[f"x{k}" for k in range(6)]], np.column_stack([y, X]))
    groups = tmp_path / "groups.txt"
    groups.write_text("".join(f"x{k},g{k // 2}\n" for k in range(6)))
    runs = []
    for r in range(2):
        out = tmp_path / f"run{r}"
        for cmd in ("fit", "cv"):
            code = main([cmd, "--data", str(data), "--groups", str(groups), "--response", "y",
                         "--family", "grmcp", "--seed", "3", "--threads", "2", "--out", str(out / cmd)])
            assert code == 0
        runs.append({str(p.relative_to(out)): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()})
    same = runs[0] == runs[1]
    artifact = tmp_path / "run0" / "fit" / "path.json"
    text = artifact.read_text()
    fit = io.read_artifact(artifact)
    rewritten = io.dumps_artifact(fit, fit.extra["input_digest"])
    roundtrip = rewritten == text and json.loads(text)["format_version"] == io.FORMAT_VERSION
    record(10, "determinism and round trip", same and roundtrip,
           f"{len(runs[0])} output files byte-identical across runs: {same}; artifact round trip byte-identical: "
           f"{roundtrip}")


if __name__ == "__main__":
    import sys
    import tempfile

    failed = 0
    tests = {int(name[7:].split("_")[0]): fn for name, fn in globals().items() if name.startswith("test_ac")}
    for _, fn in sorted(tests.items()):
        try:
            if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as tmp:
                    fn(Path(tmp))
            else:
                fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
