"""Group penalties, their thresholding operators, and the penalized objective."""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels as K


class Family(str, enum.Enum):
    LASSO = "grlasso"
    MCP = "grmcp"
    SCAD = "grscad"

    @property
    def code(self):
        return {"grlasso": K.LASSO, "grmcp": K.MCP, "grscad": K.SCAD}[self.value]


class Loss(str, enum.Enum):
    LINEAR = "linear"
    LOGISTIC = "logistic"


DEFAULT_GAMMA = {Family.LASSO: np.inf, Family.MCP: 3.0, Family.SCAD: 4.0}

# Curvature bound on the logistic loss, max of pi * (1 - pi).
V_LOGISTIC = K.V_LOGISTIC


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty family, concavity, and per-group multipliers.

    ``multipliers=None`` means sqrt(K_j) using the column count of each group
    (``multiplier_dim="original"``) or the rank found during orthonormalization
    (``"rank"``); groups flagged unpenalized in the design get 0. Solvers call
    :meth:`resolve` on the original design so the multipliers are concrete.
    """

    family: Family = Family.LASSO
    gamma: float | None = None
    multipliers: tuple[float, ...] | None = None
    loss: Loss = Loss.LINEAR
    multiplier_dim: str = "original"

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "loss", Loss(self.loss))
        gamma = DEFAULT_GAMMA[family] if self.gamma is None else float(self.gamma)
        if family is Family.MCP and not gamma > 1:
            raise ValueError(f"gamma must exceed 1 for group MCP, got {gamma}")
        if family is Family.SCAD and not gamma > 2:
            raise ValueError(f"gamma must exceed 2 for group SCAD, got {gamma}")
        object.__setattr__(self, "gamma", gamma)
        if self.multiplier_dim not in ("original", "rank"):
            raise ValueError("multiplier_dim must be 'original' or 'rank'")
        if self.multipliers is not None:
            m = tuple(float(x) for x in self.multipliers)
            if not all(np.isfinite(x) and x >= 0 for x in m):
                raise ValueError("multipliers must be finite and non-negative")
            object.__setattr__(self, "multipliers", m)

    @property
    def code(self):
        return self.family.code

    @property
    def v(self):
        return V_LOGISTIC if self.loss is Loss.LOGISTIC else 1.0

    def resolve(self, design, ranks=None):
        """Copy with concrete multipliers for ``design``."""
        if self.multipliers is not None:
            if len(self.multipliers) != design.J:
                raise ValueError(f"{len(self.multipliers)} multipliers for {design.J} groups")
            return self
        sizes = design.group_sizes if self.multiplier_dim == "original" or ranks is None else np.asarray(ranks)
        m = np.where(design.unpenalized, 0.0, np.sqrt(sizes))
        return replace(self, multipliers=tuple(m))

    def multiplier_array(self, J=None):
        if self.multipliers is None:
            raise ValueError("multipliers unresolved; call PenaltySpec.resolve(design)")
        m = np.asarray(self.multipliers, dtype=float)
        if J is not None and m.size != J:
            raise ValueError(f"{m.size} multipliers for {J} groups")
        return m

    def thresholds(self, lam, J=None):
        """Per-group threshold levels lam * m_j (0 for unpenalized groups)."""
        m = self.multiplier_array(J)
        with np.errstate(invalid="ignore"):
            return np.where(m > 0, lam * m, 0.0)


def soft_threshold(z, lam):
    """sign(z) * max(|z| - lam, 0)."""
    return K.soft(float(z), float(lam))


def firm_mcp(z, lam, gamma):
    """Univariate group-MCP solution (firm thresholding)."""
    if not gamma > 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    return K.firm(float(z), float(lam), float(gamma))


def firm_scad(z, lam, gamma):
    """Univariate SCAD solution."""
    if not gamma > 2:
        raise ValueError(f"gamma must exceed 2, got {gamma}")
    return K.firm_scad(float(z), float(lam), float(gamma))


def mv_threshold(z, lam, spec):
    """Apply the scalar operator of ``spec.family`` to ``||z||``, keeping direction."""
    z = np.asarray(z, dtype=float)
    nz = np.linalg.norm(z)
    if nz == 0.0:
        return np.zeros_like(z)
    return (K.threshold(nz, float(lam), spec.gamma, spec.code) / nz) * z


def penalty_value(norm, lam, spec):
    return K.penalty(float(norm), float(lam), spec.gamma, spec.code)


def penalty_derivative(norm, lam, spec):
    """Right derivative of the penalty in the group norm."""
    return K.penalty_derivative(float(norm), float(lam), spec.gamma, spec.code)


@dataclass(frozen=True)
class Objective:
    value: float
    loss_part: float
    penalty_part: float


def group_penalty(beta, starts, lam, spec):
    """Sum of group penalties at threshold levels lam * m_j.

    For logistic loss each group contributes p(v * ||b_j||) / v, the penalty the
    v-scaled closed-form update minimizes exactly.
    """
    thr = spec.thresholds(lam, len(starts) - 1)
    v = spec.v
    total = 0.0
    for j in range(len(starts) - 1):
        theta = np.linalg.norm(beta[starts[j]:starts[j + 1]])
        total += K.penalty(v * theta, thr[j], spec.gamma, spec.code) / v
    return total


def objective(design, beta0, beta, lam, spec):
    """Penalized objective on the (orthonormalized) design."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (design.p,):
        raise ValueError(f"beta has shape {beta.shape}, expected ({design.p},)")
    if spec.multipliers is None:
        spec = spec.resolve(design)
    eta = beta0 + design.X @ beta
    if spec.loss is Loss.LINEAR:
        resid = design.y - eta
        loss = resid @ resid / (2 * design.n)
    else:
        loss = float(np.mean(np.logaddexp(0.0, eta) - design.y * eta))
    pen = group_penalty(beta, design.starts, lam, spec)
    return Objective(value=loss + pen, loss_part=loss, penalty_part=pen)
