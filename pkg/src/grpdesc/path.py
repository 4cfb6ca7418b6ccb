"""Regularization paths with warm starts."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import _kernels as K
from .linear import NumericalError, fit_linear
from .linear import init_state as linear_init
from .logistic import check_saturation, fit_logistic, null_deviance
from .ortho import back_transform, original_intercept, orthonormalize
from .penalties import Family, Loss, PenaltySpec

log = logging.getLogger(__name__)

# guards the null fit at lambda_max against last-bit differences between the
# closed-form threshold and the solver's own inner products
LAMBDA_MAX_SLACK = 1e-12


@dataclass(frozen=True)
class FitPath:
    """Solutions along a decreasing lambda grid, on the original covariate scale."""

    lambdas: np.ndarray
    intercepts: np.ndarray
    coefficients: np.ndarray
    loss: np.ndarray
    df_groups: np.ndarray
    iters: np.ndarray
    converged: np.ndarray
    family: Family
    gamma: float
    loss_type: Loss
    column_names: tuple[str, ...]
    group_labels: tuple[str, ...]
    group_of: np.ndarray
    multipliers: np.ndarray
    saturated_at: int | None = None
    deviance: np.ndarray | None = None
    null_deviance: float | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.lambdas)

    @property
    def p(self):
        return self.coefficients.shape[1]

    def group_norms(self):
        """L x J matrix of Euclidean norms of each group's original-scale coefficients."""
        starts = np.searchsorted(self.group_of, np.arange(len(self.group_labels)))
        if len(self) == 0:
            return np.zeros((0, len(starts)))
        return np.sqrt(np.add.reduceat(self.coefficients ** 2, starts, axis=1))

    def linear_predictor(self, X, index=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.p:
            raise ValueError(f"X must have {self.p} columns")
        if index is None:
            return self.intercepts[None, :] + X @ self.coefficients.T
        return self.intercepts[index] + X @ self.coefficients[index]

    def predict(self, X, index=None):
        """Fitted means: identity scale for linear loss, probabilities for logistic."""
        eta = self.linear_predictor(X, index)
        if self.loss_type is Loss.LOGISTIC:
            return expit(eta)
        return eta


def lambda_max(design, transform, spec):
    """Smallest lambda at which every penalized group is zero.

    ``design`` and ``transform`` come from :func:`orthonormalize`; ``spec`` must
    have resolved multipliers. Returns (lambda_max, starting state), where the
    state is the fit with penalized groups held at zero.
    """
    m = spec.multiplier_array(design.J)
    penalized = m > 0
    if not penalized.any():
        raise ValueError("all groups are unpenalized; nothing to regularize")
    starts = design.starts
    if spec.loss is Loss.LINEAR:
        if design.unpenalized.any() or not penalized.all():
            state = fit_linear(design, np.inf, spec, tol=1e-13, max_iter=100_000)
        else:
            state = linear_init(design)
        r, v = state.residuals, 1.0
    else:
        state = fit_logistic(design, np.inf, spec, tol=1e-13, max_iter=100_000)
        r, v = state.pseudo_residuals, spec.v
    X = np.asfortranarray(design.X)
    zero = np.zeros(design.p)
    best = 0.0
    for j in np.flatnonzero(penalized):
        z = np.empty(starts[j + 1] - starts[j])
        K.group_z(X, r, zero, starts[j], starts[j + 1], design.n, z)
        best = max(best, v * np.linalg.norm(z) / m[j])
    return best * (1 + LAMBDA_MAX_SLACK), state


def build_grid(lam_max, n, p, n_lambda=100, min_ratio=None):
    """Log-spaced grid from lam_max down to lam_max * min_ratio."""
    if not lam_max > 0:
        raise ValueError("lambda_max must be positive")
    if n_lambda < 2:
        raise ValueError("n_lambda must be at least 2")
    if min_ratio is None:
        min_ratio = 0.001 if n > p else 0.05
    if not 0 < min_ratio < 1:
        raise ValueError("min_ratio must lie in (0, 1)")
    return lam_max * min_ratio ** (np.arange(n_lambda) / (n_lambda - 1))


def fit_path(design, spec=None, n_lambda=100, min_ratio=None, lambdas=None, tol=1e-6,
             max_iter=10_000, warm=True, eigen_tolerance=1e-10):
    """Fit the whole path, largest lambda first.

    Pass ``lambdas`` to reuse a grid (e.g. from the full data during
    cross-validation); otherwise one is built from lambda_max.
    """
    spec = PenaltySpec() if spec is None else spec
    ortho, transform = orthonormalize(design, spec.loss, eigen_tolerance)
    spec = spec.resolve(design, ranks=transform.ranks)
    lam_max, start = lambda_max(ortho, transform, spec)
    if lambdas is None:
        lambdas = build_grid(lam_max, design.n, design.p, n_lambda, min_ratio)
    else:
        lambdas = np.asarray(lambdas, dtype=float)
        if lambdas.ndim != 1 or len(lambdas) < 1 or np.any(np.diff(lambdas) >= 0) or np.any(lambdas < 0):
            raise ValueError("lambdas must be non-negative and strictly decreasing")

    logistic = spec.loss is Loss.LOGISTIC
    null_dev = null_deviance(design.y) if logistic else None
    L, pt = len(lambdas), ortho.p
    betas = np.zeros((L, pt))
    beta0s = np.zeros(L)
    losses = np.zeros(L)
    iters = np.zeros(L, dtype=np.int64)
    conv = np.zeros(L, dtype=bool)
    devs = np.zeros(L) if logistic else None
    saturated_at = None

    state = start
    for i, lam in enumerate(lambdas):
        init = state if warm else None
        try:
            if logistic:
                state = fit_logistic(ortho, lam, spec, init=init, tol=tol, max_iter=max_iter)
            else:
                state = fit_linear(ortho, lam, spec, init=init, tol=tol, max_iter=max_iter)
        except NumericalError as exc:
            raise NumericalError(f"lambda index {i} (lambda={lam:.6g}): {exc}") from exc
        if logistic and check_saturation(state, null_dev):
            saturated_at = i
            log.info("saturated at lambda index %d", i)
            break
        betas[i] = state.beta
        iters[i] = state.iter
        conv[i] = state.converged
        if logistic:
            beta0s[i] = state.beta0
            devs[i] = state.deviance
            losses[i] = K.logistic_loss(ortho.y, state.eta)
        else:
            losses[i] = state.residuals @ state.residuals / (2 * design.n)

    keep = L if saturated_at is None else saturated_at
    if not conv[:keep].all():
        warnings.warn(
            f"{int((~conv[:keep]).sum())} of {keep} lambda values hit max_iter={max_iter}",
            RuntimeWarning,
            stacklevel=2,
        )
    coefs = back_transform(betas[:keep], transform)
    intercepts = original_intercept(beta0s[:keep], coefs, transform)
    sq = np.add.reduceat(betas[:keep] ** 2, ortho.starts[:-1], axis=1) if keep else np.zeros((0, design.J))
    df = (sq > 0).sum(axis=1)
    return FitPath(
        lambdas=lambdas[:keep],
        intercepts=np.atleast_1d(intercepts),
        coefficients=coefs,
        loss=losses[:keep],
        df_groups=df,
        iters=iters[:keep],
        converged=conv[:keep],
        family=spec.family,
        gamma=spec.gamma,
        loss_type=spec.loss,
        column_names=design.column_names,
        group_labels=design.group_labels,
        group_of=design.group_of,
        multipliers=spec.multiplier_array(),
        saturated_at=saturated_at,
        deviance=None if devs is None else devs[:keep],
        null_deviance=null_dev,
        extra={"lambda_max": lam_max, "ranks": transform.ranks},
    )
