"""Group descent for penalized least squares on an orthonormalized design."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels as K


class NumericalError(ArithmeticError):
    pass


@dataclass
class SolverState:
    beta: np.ndarray
    residuals: np.ndarray
    iter: int = 0
    converged: bool = False
    objective_trace: np.ndarray | None = None


def _spec_for(design, spec):
    return spec if spec.multipliers is not None else spec.resolve(design)


def _order(design, order):
    if order is None:
        return np.arange(design.J, dtype=np.int64)
    order = np.asarray(order, dtype=np.int64)
    if sorted(order.tolist()) != list(range(design.J)):
        raise ValueError("order must be a permutation of the group ids")
    return order


def init_state(design, beta=None):
    """State at ``beta`` (zeros by default) with exact residuals."""
    beta = np.zeros(design.p) if beta is None else np.array(beta, dtype=float)
    if beta.shape != (design.p,):
        raise ValueError(f"init has shape {beta.shape}, expected ({design.p},)")
    return SolverState(beta=beta, residuals=design.y - design.X @ beta)


def group_update(design, state, j, lam, spec):
    """Exactly minimize the objective over group ``j``; returns a new state."""
    spec = _spec_for(design, spec)
    thr = spec.thresholds(lam, design.J)
    X = np.asfortranarray(design.X)
    beta = state.beta.copy()
    r = state.residuals.copy()
    s = design.starts
    z = np.empty(s[j + 1] - s[j])
    K.update_group(X, r, beta, s[j], s[j + 1], thr[j], spec.gamma, spec.code, 1.0, z)
    return replace(state, beta=beta, residuals=r)


def fit_linear(design, lam, spec, init=None, tol=1e-6, max_iter=10_000, trace=False, order=None):
    """Cycle group updates until no coefficient moves by ``tol`` or more.

    ``design`` must be orthonormalized with centered y. Unresolved multipliers
    default to sqrt of the group widths of ``design``.
    """
    spec = _spec_for(design, spec)
    thr = spec.thresholds(lam, design.J)
    state = init if isinstance(init, SolverState) else init_state(design, init)
    beta = state.beta.copy()
    r = state.residuals.copy()
    buf = np.empty(max_iter + 1 if trace else 0)
    X = np.asfortranarray(design.X)
    it, converged = K.linear_fit(
        X, design.y, r, beta, design.starts, thr, spec.gamma, spec.code,
        tol, max_iter, _order(design, order), buf,
    )
    if not np.all(np.isfinite(r)):
        raise NumericalError(f"non-finite residuals at lambda={lam}")
    return SolverState(
        beta=beta,
        residuals=r,
        iter=int(it),
        converged=bool(converged),
        objective_trace=buf[: it + 1] if trace else None,
    )
