"""Group descent for penalized logistic regression by majorization-minimization.

Each cycle replaces the loss with a quadratic upper bound of curvature
v = 1/4 around the current linear predictor, then sweeps the groups once on
that bound using the v-scaled closed-form updates.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels as K
from .linear import NumericalError, _order, _spec_for
from .penalties import V_LOGISTIC

SATURATION = 0.99


@dataclass
class MMState:
    beta0: float
    beta: np.ndarray
    eta: np.ndarray
    pi: np.ndarray
    pseudo_residuals: np.ndarray
    v: float = V_LOGISTIC
    deviance: float = np.nan
    iter: int = 0
    converged: bool = False
    objective_trace: np.ndarray | None = None


def deviance(y, pi):
    """-2 log-likelihood; probabilities clamped to [1e-10, 1 - 1e-10]."""
    pi = np.clip(pi, 1e-10, 1 - 1e-10)
    return float(-2.0 * np.sum(y * np.log(pi) + (1 - y) * np.log1p(-pi)))


def null_deviance(y):
    ybar = float(np.mean(y))
    return deviance(y, np.full(len(y), ybar))


def _check_binary(y):
    y = np.asarray(y)
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("logistic loss needs a 0/1 response")
    if y.min() == y.max():
        raise ValueError("logistic loss needs both classes present")


def init_state(design, beta0=None, beta=None):
    """Refresh eta, pi and pseudo-residuals at (beta0, beta).

    Defaults to the intercept-only fit logit(mean(y)), beta = 0.
    """
    y = design.y
    if beta0 is None:
        ybar = float(np.mean(y))
        beta0 = float(np.log(ybar / (1 - ybar)))
    beta = np.zeros(design.p) if beta is None else np.array(beta, dtype=float)
    if beta.shape != (design.p,):
        raise ValueError(f"init has shape {beta.shape}, expected ({design.p},)")
    n = design.n
    state = MMState(beta0=float(beta0), beta=beta, eta=np.empty(n), pi=np.empty(n),
                    pseudo_residuals=np.empty(n))
    K.mm_majorize(np.asfortranarray(design.X), y, state.beta0, beta, state.eta, state.pi,
                  state.pseudo_residuals)
    state.deviance = deviance(y, state.pi)
    return state


def mm_cycle(design, state, lam, spec, order=None):
    """One majorize step plus one minimizing sweep; returns a new state."""
    spec = _spec_for(design, spec)
    thr = spec.thresholds(lam, design.J)
    X = np.asfortranarray(design.X)
    n = design.n
    beta = state.beta.copy()
    eta, pi, rt = np.empty(n), np.empty(n), np.empty(n)
    K.mm_majorize(X, design.y, state.beta0, beta, eta, pi, rt)
    z = np.empty(int(design.group_sizes.max()))
    beta0, _ = K.mm_sweep(X, state.beta0, beta, rt, design.starts, thr, spec.gamma,
                          spec.code, _order(design, order), z)
    if not np.all(np.isfinite(rt)):
        raise NumericalError(f"non-finite pseudo-residuals at lambda={lam}")
    out = replace(state, beta0=float(beta0), beta=beta, iter=state.iter + 1)
    K.mm_majorize(X, design.y, out.beta0, beta, eta, pi, rt)
    out.eta, out.pi, out.pseudo_residuals = eta, pi, rt
    out.deviance = deviance(design.y, pi)
    return out


def fit_logistic(design, lam, spec, init=None, tol=1e-6, max_iter=10_000, trace=False, order=None):
    """Repeat MM cycles until no coefficient (intercept included) moves by ``tol``.

    ``init`` may be an MMState or a (beta0, beta) pair. The design must be
    orthonormalized with centered columns.
    """
    _check_binary(design.y)
    spec = _spec_for(design, spec)
    thr = spec.thresholds(lam, design.J)
    if init is None:
        beta0, beta = None, None
    elif isinstance(init, MMState):
        beta0, beta = init.beta0, init.beta
    else:
        beta0, beta = init
    state = init_state(design, beta0, beta)
    beta = state.beta.copy()
    buf = np.empty(max_iter + 1 if trace else 0)
    X = np.asfortranarray(design.X)
    b0, it, converged = K.logistic_fit(
        X, design.y, state.beta0, beta, state.eta, state.pi, state.pseudo_residuals,
        design.starts, thr, spec.gamma, spec.code, tol, max_iter, _order(design, order), buf,
    )
    if not (np.isfinite(b0) and np.all(np.isfinite(state.pi))):
        raise NumericalError(f"non-finite fitted probabilities at lambda={lam}")
    state.beta0 = float(b0)
    state.beta = beta
    state.iter = int(it)
    state.converged = bool(converged)
    state.deviance = deviance(design.y, state.pi)
    if trace:
        state.objective_trace = buf[: it + 1]
    return state


def check_saturation(state, null_dev):
    """True when the fit explains more than 99% of the null deviance."""
    if not null_dev > 0:
        raise ValueError("null deviance must be positive")
    return bool(1.0 - state.deviance / null_dev > SATURATION)
