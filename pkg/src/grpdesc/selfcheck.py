"""Solver-versus-oracle agreement on small random problems."""
import sys

import numpy as np

from .design import GroupedDesign
from .linear import fit_linear
from .logistic import fit_logistic
from .oracle import brute_minimize, worst_directional_change
from .ortho import orthonormalize
from .penalties import Loss, PenaltySpec, objective


def small_problem(seed, loss="linear", n=20, sizes=(3, 3)):
    """Random design with a couple of active groups, already orthonormalized."""
    rng = np.random.default_rng(seed)
    p = sum(sizes)
    X = rng.standard_normal((n, p))
    b = np.zeros(p)
    b[: sizes[0]] = rng.normal(0, 1, sizes[0])
    eta = X @ b + rng.standard_normal(n)
    y = (eta > 0).astype(float) if loss == "logistic" else eta
    if loss == "logistic" and y.min() == y.max():
        y[0] = 1 - y[0]
    groups = np.repeat(np.arange(len(sizes)), sizes)
    design = GroupedDesign.from_arrays(X, y, groups)
    ortho, _ = orthonormalize(design, loss)
    return design, ortho


def solve(ortho, lam, spec, tol=1e-12):
    if spec.loss is Loss.LOGISTIC:
        s = fit_logistic(ortho, lam, spec, tol=tol, max_iter=200_000)
        return s.beta0, s.beta
    s = fit_linear(ortho, lam, spec, tol=tol)
    return 0.0, s.beta


def run_selfcheck(seed=0, instances=3, out=sys.stdout):
    ok = True
    for loss, rtol in (("linear", 1e-6), ("logistic", 1e-4)):
        for i in range(instances):
            design, ortho = small_problem(seed + i, loss)
            spec = PenaltySpec("grlasso", loss=loss).resolve(design)
            lam = 0.05
            b0, b = solve(ortho, lam, spec)
            q = objective(ortho, b0, b, lam, spec).value
            ref = brute_minimize(ortho, lam, spec, n_starts=2, seed=seed + i).objective
            good = (q - ref) / abs(ref) <= rtol
            ok &= good
            print(f"{'PASS' if good else 'FAIL'} oracle {loss} grlasso #{i}: solver={q:.10g} oracle={ref:.10g}",
                  file=out)
    for fam in ("grmcp", "grscad"):
        for i in range(instances):
            design, ortho = small_problem(100 + seed + i)
            spec = PenaltySpec(fam).resolve(design)
            b0, b = solve(ortho, 0.1, spec)
            worst = worst_directional_change(ortho, b0, b, 0.1, spec, seed=i)
            good = worst >= -1e-8
            ok &= good
            print(f"{'PASS' if good else 'FAIL'} stationarity {fam} #{i}: worst change {worst:.3g}", file=out)
    return ok
