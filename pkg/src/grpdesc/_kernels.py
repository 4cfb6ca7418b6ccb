"""Compiled inner loops for group descent.

Columns of the design are read one at a time, so callers pass Fortran-ordered
arrays. Groups are contiguous column blocks ``starts[j]:starts[j + 1]``.
Penalty families are encoded as ints: 0 lasso, 1 MCP, 2 SCAD.
"""
import math

import numpy as np
from numba import njit

LASSO, MCP, SCAD = 0, 1, 2
V_LOGISTIC = 0.25
RESYNC_EVERY = 1000


@njit(cache=True, nogil=True)
def soft(z, lam):
    if z > lam:
        return z - lam
    if z < -lam:
        return z + lam
    return 0.0


@njit(cache=True, nogil=True)
def firm(z, lam, gamma):
    if abs(z) <= gamma * lam:
        return soft(z, lam) / (1.0 - 1.0 / gamma)
    return z


@njit(cache=True, nogil=True)
def firm_scad(z, lam, gamma):
    az = abs(z)
    if az <= 2.0 * lam:
        return soft(z, lam)
    if az <= gamma * lam:
        return soft(z, gamma * lam / (gamma - 1.0)) / (1.0 - 1.0 / (gamma - 1.0))
    return z


@njit(cache=True, nogil=True)
def threshold(z, lam, gamma, family):
    if family == LASSO:
        return soft(z, lam)
    if family == MCP:
        return firm(z, lam, gamma)
    return firm_scad(z, lam, gamma)


@njit(cache=True, nogil=True)
def penalty(theta, lam, gamma, family):
    """Penalty at a non-negative norm ``theta``."""
    if family == LASSO:
        return lam * theta
    if family == MCP:
        if theta <= gamma * lam:
            return lam * theta - theta * theta / (2.0 * gamma)
        return 0.5 * gamma * lam * lam
    if theta <= lam:
        return lam * theta
    if theta <= gamma * lam:
        return (gamma * lam * theta - 0.5 * (theta * theta + lam * lam)) / (gamma - 1.0)
    return lam * lam * (gamma * gamma - 1.0) / (2.0 * (gamma - 1.0))


@njit(cache=True, nogil=True)
def penalty_derivative(theta, lam, gamma, family):
    if family == LASSO:
        return lam
    if family == MCP:
        if theta <= gamma * lam:
            return lam - theta / gamma
        return 0.0
    if theta <= lam:
        return lam
    if theta <= gamma * lam:
        return (gamma * lam - theta) / (gamma - 1.0)
    return 0.0


@njit(cache=True, nogil=True)
def group_z(X, r, beta, start, stop, n, out):
    for k in range(start, stop):
        acc = 0.0
        for i in range(n):
            acc += X[i, k] * r[i]
        out[k - start] = acc / n + beta[k]


@njit(cache=True, nogil=True)
def update_group(X, r, beta, start, stop, thr, gamma, family, v, z):
    """Minimize over one group and update ``r`` in place.

    ``r`` holds residuals (linear, ``v = 1``) or pseudo-residuals ``(y - pi) / v``.
    Returns the largest absolute coefficient change.
    """
    n = X.shape[0]
    group_z(X, r, beta, start, stop, n, z)
    K = stop - start
    nz = 0.0
    for k in range(K):
        nz += z[k] * z[k]
    nz = math.sqrt(nz)
    if nz == 0.0:
        scale = 0.0
    else:
        scale = threshold(v * nz, thr, gamma, family) / (v * nz)
    biggest = 0.0
    for k in range(K):
        col = start + k
        new = scale * z[k]
        d = new - beta[col]
        if d != 0.0:
            for i in range(n):
                r[i] -= d * X[i, col]
            beta[col] = new
            if abs(d) > biggest:
                biggest = abs(d)
    return biggest


@njit(cache=True, nogil=True)
def _residuals(X, y, beta, out):
    n, p = X.shape
    for i in range(n):
        out[i] = y[i]
    for k in range(p):
        b = beta[k]
        if b != 0.0:
            for i in range(n):
                out[i] -= b * X[i, k]


@njit(cache=True, nogil=True)
def _linear_objective(X, r, beta, starts, thr, gamma, family):
    n = r.shape[0]
    loss = 0.0
    for i in range(n):
        loss += r[i] * r[i]
    loss /= 2.0 * n
    pen = 0.0
    for j in range(starts.shape[0] - 1):
        s = 0.0
        for k in range(starts[j], starts[j + 1]):
            s += beta[k] * beta[k]
        pen += penalty(math.sqrt(s), thr[j], gamma, family)
    return loss + pen


@njit(cache=True, nogil=True)
def linear_fit(X, y, r, beta, starts, thr, gamma, family, tol, max_iter, order, trace):
    """Cycle over groups until the largest coefficient change is below ``tol``.

    ``beta`` and ``r`` are updated in place. If ``trace`` is non-empty, the
    objective before the first cycle and after every cycle is written to it.
    Returns (cycles, converged).
    """
    J = starts.shape[0] - 1
    kmax = 0
    for j in range(J):
        kmax = max(kmax, starts[j + 1] - starts[j])
    z = np.empty(kmax)
    record = trace.shape[0] > 0
    if record:
        trace[0] = _linear_objective(X, r, beta, starts, thr, gamma, family)
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        biggest = 0.0
        for jj in range(J):
            j = order[jj]
            d = update_group(X, r, beta, starts[j], starts[j + 1], thr[j], gamma, family, 1.0, z)
            if d > biggest:
                biggest = d
        if it % RESYNC_EVERY == 0:
            _residuals(X, y, beta, r)
        if record and it < trace.shape[0]:
            trace[it] = _linear_objective(X, r, beta, starts, thr, gamma, family)
        if biggest < tol:
            converged = True
            break
    _residuals(X, y, beta, r)
    return it, converged


@njit(cache=True, nogil=True)
def sigmoid(eta):
    if eta >= 0.0:
        return 1.0 / (1.0 + math.exp(-eta))
    e = math.exp(eta)
    return e / (1.0 + e)


@njit(cache=True, nogil=True)
def softplus(eta):
    if eta > 0.0:
        return eta + math.log1p(math.exp(-eta))
    return math.log1p(math.exp(eta))


@njit(cache=True, nogil=True)
def linear_predictor(X, beta0, beta, out):
    n, p = X.shape
    for i in range(n):
        out[i] = beta0
    for k in range(p):
        b = beta[k]
        if b != 0.0:
            for i in range(n):
                out[i] += b * X[i, k]


@njit(cache=True, nogil=True)
def logistic_loss(y, eta):
    n = y.shape[0]
    acc = 0.0
    for i in range(n):
        acc += softplus(eta[i]) - y[i] * eta[i]
    return acc / n


@njit(cache=True, nogil=True)
def _logistic_objective(y, eta, beta, starts, thr, gamma, family):
    v = V_LOGISTIC
    pen = 0.0
    for j in range(starts.shape[0] - 1):
        s = 0.0
        for k in range(starts[j], starts[j + 1]):
            s += beta[k] * beta[k]
        pen += penalty(v * math.sqrt(s), thr[j], gamma, family) / v
    return logistic_loss(y, eta) + pen


@njit(cache=True, nogil=True)
def mm_majorize(X, y, beta0, beta, eta, pi, rt):
    linear_predictor(X, beta0, beta, eta)
    for i in range(y.shape[0]):
        pi[i] = sigmoid(eta[i])
        rt[i] = (y[i] - pi[i]) / V_LOGISTIC


@njit(cache=True, nogil=True)
def mm_sweep(X, beta0, beta, rt, starts, thr, gamma, family, order, z):
    """Intercept step then one pass over the groups on the current majorizer.

    Returns (new intercept, largest change).
    """
    n = rt.shape[0]
    shift = 0.0
    for i in range(n):
        shift += rt[i]
    shift /= n
    if shift != 0.0:
        for i in range(n):
            rt[i] -= shift
    biggest = abs(shift)
    for jj in range(starts.shape[0] - 1):
        j = order[jj]
        d = update_group(X, rt, beta, starts[j], starts[j + 1], thr[j], gamma, family, V_LOGISTIC, z)
        if d > biggest:
            biggest = d
    return beta0 + shift, biggest


@njit(cache=True, nogil=True)
def logistic_fit(X, y, beta0, beta, eta, pi, rt, starts, thr, gamma, family, tol, max_iter, order, trace):
    """MM loop. ``beta``, ``eta``, ``pi`` and ``rt`` are updated in place.

    Returns (intercept, cycles, converged); on exit ``eta``/``pi`` match the
    returned coefficients.
    """
    J = starts.shape[0] - 1
    kmax = 0
    for j in range(J):
        kmax = max(kmax, starts[j + 1] - starts[j])
    z = np.empty(kmax)
    record = trace.shape[0] > 0
    it = 0
    converged = False
    while it < max_iter:
        mm_majorize(X, y, beta0, beta, eta, pi, rt)
        if record and it < trace.shape[0]:
            trace[it] = _logistic_objective(y, eta, beta, starts, thr, gamma, family)
        it += 1
        beta0, biggest = mm_sweep(X, beta0, beta, rt, starts, thr, gamma, family, order, z)
        if biggest < tol:
            converged = True
            break
    mm_majorize(X, y, beta0, beta, eta, pi, rt)
    if record and it < trace.shape[0]:
        trace[it] = _logistic_objective(y, eta, beta, starts, thr, gamma, family)
    return beta0, it, converged
