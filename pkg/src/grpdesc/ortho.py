"""Per-group orthonormalization and back-transformation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import DataError, GroupedDesign
from .penalties import Loss


class OrthonormalizationError(DataError):
    pass


@dataclass(frozen=True)
class OrthoTransform:
    """Maps orthonormal-scale coefficients back to the original columns.

    ``bases[j]`` is K_j x r_j, equal to Q_j diag(lambda)^(-1/2) from the
    eigendecomposition of the centered group Gram matrix (1/n) X_j' X_j.
    """

    bases: tuple[np.ndarray, ...]
    ranks: np.ndarray
    x_mean: np.ndarray
    y_mean: float
    loss: Loss
    eigen_tolerance: float
    starts: np.ndarray
    ortho_starts: np.ndarray

    @property
    def p(self):
        return int(self.starts[-1])

    @property
    def p_tilde(self):
        return int(self.ortho_starts[-1])

    def matrix(self):
        """Block-diagonal p x p_tilde matrix of all bases."""
        T = np.zeros((self.p, self.p_tilde))
        for j, B in enumerate(self.bases):
            T[self.starts[j]:self.starts[j + 1], self.ortho_starts[j]:self.ortho_starts[j + 1]] = B
        return T


def orthonormalize(design, loss=Loss.LINEAR, eigen_tolerance=1e-10):
    """Center the design and orthonormalize every group.

    Returns the orthonormalized design (Fortran-ordered X with sum(r_j)
    columns; y centered for linear loss) and the transform back.
    """
    loss = Loss(loss)
    X = design.X
    n = design.n
    x_mean = X.mean(axis=0)
    Xc = X - x_mean
    # constant columns center to exactly zero only up to rounding
    Xc[:, np.ptp(X, axis=0) == 0] = 0.0
    if loss is Loss.LINEAR:
        y_mean = float(design.y.mean())
        y = design.y - y_mean
    else:
        y_mean = 0.0
        y = design.y

    bases, ranks, blocks = [], [], []
    for j, sl in enumerate(design.group_slices()):
        Xj = Xc[:, sl]
        gram = Xj.T @ Xj / n
        evals, evecs = np.linalg.eigh(gram)
        top = evals[-1]
        if not top > 0:
            raise OrthonormalizationError(
                f"group '{design.group_labels[j]}' has no variation (all columns constant)"
            )
        keep = evals > eigen_tolerance * top
        basis = evecs[:, keep] / np.sqrt(evals[keep])
        # largest eigenvalue first, deterministic sign
        basis = basis[:, ::-1]
        signs = np.sign(basis[np.argmax(np.abs(basis), axis=0), np.arange(basis.shape[1])])
        basis = basis * signs
        bases.append(basis)
        ranks.append(basis.shape[1])
        blocks.append(Xj @ basis)

    ranks = np.array(ranks, dtype=np.int64)
    Xt = np.asfortranarray(np.hstack(blocks))
    group_of = np.repeat(np.arange(design.J), ranks)
    ortho = GroupedDesign(
        X=Xt,
        y=y,
        group_of=group_of,
        group_labels=design.group_labels,
        column_names=tuple(f"{design.group_labels[g]}~{k}" for g, k in _within(ranks)),
        unpenalized=design.unpenalized,
    )
    transform = OrthoTransform(
        bases=tuple(bases),
        ranks=ranks,
        x_mean=x_mean,
        y_mean=y_mean,
        loss=loss,
        eigen_tolerance=eigen_tolerance,
        starts=design.starts,
        ortho_starts=np.concatenate([[0], np.cumsum(ranks)]).astype(np.int64),
    )
    return ortho, transform


def _within(ranks):
    for g, r in enumerate(ranks):
        for k in range(r):
            yield g, k


def back_transform(beta_tilde, transform):
    """Original-scale coefficients from orthonormal-scale ones.

    Accepts a vector of length sum(r_j) or a stack of them (one per row).
    """
    bt = np.asarray(beta_tilde, dtype=float)
    if bt.shape[-1] != transform.p_tilde:
        raise ValueError(f"beta_tilde has {bt.shape[-1]} entries, expected {transform.p_tilde}")
    out = np.zeros(bt.shape[:-1] + (transform.p,))
    for j, B in enumerate(transform.bases):
        out[..., transform.starts[j]:transform.starts[j + 1]] = (
            bt[..., transform.ortho_starts[j]:transform.ortho_starts[j + 1]] @ B.T
        )
    return out


def original_intercept(beta0, beta, transform):
    """Intercept on the uncentered covariate scale.

    ``beta0`` is the centered-scale intercept (ignored for linear loss, where
    it is the response mean).
    """
    base = transform.y_mean if transform.loss is Loss.LINEAR else beta0
    return base - np.asarray(beta) @ transform.x_mean
