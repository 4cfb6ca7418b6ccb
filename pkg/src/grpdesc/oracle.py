"""Reference evaluations for certifying the solvers on small problems.

Nothing here calls into the compiled kernels or the penalty module's
evaluation code; the formulas are written out again from scratch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_expit

MAX_NAIVE_P = 50
MAX_BRUTE_DIM = 8
V_LOGISTIC = 0.25


@dataclass(frozen=True)
class OracleSolution:
    beta: np.ndarray
    beta0: float
    objective: float
    n_starts: int
    per_start_values: tuple[float, ...]


def _rate(t, lam, gamma, family):
    """Penalization rate at norm t."""
    if family == "grlasso":
        return lam
    if family == "grmcp":
        return max(lam - t / gamma, 0.0)
    if t <= lam:
        return lam
    return max(gamma * lam - t, 0.0) / (gamma - 1)


def naive_penalty(theta, lam, gamma, family):
    """Integral of the penalization rate from 0 to theta, done piecewise."""
    if family == "grlasso":
        return lam * theta
    if family == "grmcp":
        t = min(theta, gamma * lam)
        return lam * t - t * t / (2 * gamma)
    a = min(theta, lam)
    b = min(max(theta, lam), gamma * lam)
    return lam * a + (gamma * lam * (b - lam) - (b * b - lam * lam) / 2) / (gamma - 1)


def _setup(design, spec):
    if spec.multipliers is None:
        spec = spec.resolve(design)
    groups = [np.flatnonzero(design.group_of == j) for j in range(design.J)]
    return spec, groups, np.asarray(spec.multipliers, dtype=float)


def naive_objective(design, beta0, beta, lam, spec):
    """Penalized objective by direct summation."""
    if design.p > MAX_NAIVE_P:
        raise ValueError(f"naive_objective is limited to p <= {MAX_NAIVE_P}")
    spec, groups, m = _setup(design, spec)
    logistic = spec.loss.value == "logistic"
    total = 0.0
    for i in range(design.n):
        eta = beta0 + sum(design.X[i, k] * beta[k] for k in range(design.p))
        if logistic:
            total -= log_expit(eta) if design.y[i] == 1 else log_expit(-eta)
        else:
            total += 0.5 * (design.y[i] - eta) ** 2
    total /= design.n
    s = V_LOGISTIC if logistic else 1.0
    for j, idx in enumerate(groups):
        theta = math.sqrt(sum(beta[k] ** 2 for k in idx))
        total += naive_penalty(s * theta, lam * m[j], spec.gamma, spec.family.value) / s
    return total


def _objective_fn(design, lam, spec):
    """Vectorized twin of naive_objective for the search loops."""
    spec, groups, m = _setup(design, spec)
    logistic = spec.loss.value == "logistic"
    s = V_LOGISTIC if logistic else 1.0
    X, y, n = design.X, design.y, design.n
    fam, gamma = spec.family.value, spec.gamma

    def f(theta):
        b0, b = (theta[0], theta[1:]) if logistic else (0.0, theta)
        eta = b0 + X @ b
        if logistic:
            loss = -np.sum(np.where(y == 1, log_expit(eta), log_expit(-eta))) / n
        else:
            loss = 0.5 * np.sum((y - eta) ** 2) / n
        pen = sum(naive_penalty(s * math.sqrt(float(b[idx] @ b[idx])), lam * m[j], gamma, fam) / s
                  for j, idx in enumerate(groups))
        return loss + pen

    return f, logistic


def pattern_search(f, x0, rng, step=0.5, min_step=1e-8, max_evals=500_000):
    """Opportunistic compass search over the axes plus a fresh random rotation
    each round; doubles the step after a success, halves it after a failure."""
    x = np.array(x0, dtype=float)
    fx = f(x)
    d = x.size
    evals = 1
    eye = np.eye(d)
    while step > min_step and evals < max_evals:
        q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        dirs = np.vstack([eye, -eye, q.T, -q.T])
        for u in dirs:
            cand = x + step * u
            fc = f(cand)
            evals += 1
            if fc < fx:
                x, fx = cand, fc
                step *= 2.0
                break
        else:
            step *= 0.5
    return x, fx


def brute_minimize(design, lam, spec, n_starts=32, seed=0):
    """Best of many derivative-free local searches of the naive objective.

    Starts: zero, the least-squares point, and ``n_starts`` seeded random
    points. The intercept is a free coordinate for logistic loss.
    """
    f, logistic = _objective_fn(design, lam, spec)
    dim = design.p + int(logistic)
    if dim > MAX_BRUTE_DIM:
        raise ValueError(f"brute_minimize is limited to {MAX_BRUTE_DIM} free parameters, got {dim}")
    rng = np.random.default_rng(seed)
    ls = np.linalg.lstsq(design.X, design.y - design.y.mean(), rcond=None)[0]
    starts = [np.zeros(dim), np.concatenate([[0.0], ls]) if logistic else ls]
    starts += [rng.normal(size=dim) for _ in range(n_starts)]
    results = [pattern_search(f, x0, rng) for x0 in starts]
    values = tuple(float(v) for _, v in results)
    best = int(np.argmin(values))
    x = results[best][0]
    return OracleSolution(
        beta=x[1:] if logistic else x,
        beta0=float(x[0]) if logistic else 0.0,
        objective=values[best],
        n_starts=len(starts),
        per_start_values=values,
    )


def stationarity_violation(design, beta0, beta, lam, spec):
    """Per-group violation of the first-order conditions.

    Nonzero groups: sup-norm of loss gradient plus penalty gradient. Zero
    groups: how far the loss-gradient norm exceeds the threshold lam * m_j.
    """
    spec, groups, m = _setup(design, spec)
    logistic = spec.loss.value == "logistic"
    s = V_LOGISTIC if logistic else 1.0
    eta = beta0 + design.X @ beta
    mean = 1 / (1 + np.exp(-eta)) if logistic else eta
    grad = -design.X.T @ (design.y - mean) / design.n
    out = np.zeros(design.J)
    for j, idx in enumerate(groups):
        g, b = grad[idx], beta[idx]
        nb = np.linalg.norm(b)
        if nb > 0:
            rate = _rate(s * nb, lam * m[j], spec.gamma, spec.family.value)
            out[j] = np.max(np.abs(g + rate * b / nb))
        else:
            out[j] = max(np.linalg.norm(g) - lam * m[j], 0.0)
    return out


def worst_directional_change(design, beta0, beta, lam, spec, n_dirs=20, step=1e-5, seed=0):
    """Smallest change Q(x + step*u) - Q(x) over random unit directions u.

    A stationary point gives a value no lower than about -1e-8 at this step.
    """
    f, logistic = _objective_fn(design, lam, spec)
    x = np.concatenate([[beta0], beta]) if logistic else np.asarray(beta, dtype=float)
    rng = np.random.default_rng(seed)
    f0 = f(x)
    worst = np.inf
    for _ in range(n_dirs):
        u = rng.normal(size=x.size)
        u /= np.linalg.norm(u)
        worst = min(worst, f(x + step * u) - f0, f(x - step * u) - f0)
    return worst
