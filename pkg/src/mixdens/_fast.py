"""Hot numerical kernels with numba and pure-numpy implementations.

The numba versions are compiled lazily and selected through
:mod:`mixdens.backend`; set ``MIXDENS_BACKEND=numpy`` to force the
fallback. Both implementations are importable (``*_nb`` / ``*_np``) so
parity tests and benchmarks can compare them directly.

Log-density matrices are plain numpy broadcasts (memory-bound either
way); the loops that dominate runtime are the EM sweep, the mixture
objective accumulation, the Monte Carlo log-mean reduction, and the KDE.
The latter three exploit the shared exponential-family form
``log f(y|theta) = y*eta(theta) + offset(theta) + base(y)`` so one kernel
serves all four families.
"""

import math

import numpy as np
from scipy.special import gammaln

from .backend import HAVE_NUMBA, USE_NUMBA

__all__ = [
    "ll_mat_gauss",
    "ll_mat_poisson",
    "ll_mat_gamma",
    "ll_mat_binom",
    "em_loop",
    "em_batch",
    "mix_objective",
    "logf_mean_draws",
    "kde_gauss",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


# ---------------------------------------------------------------------------
# log-density matrices (numpy broadcasts, shared by both backends)

def ll_mat_gauss(y, theta):
    d = y[:, None] - theta[None, :]
    return -0.5 * d * d - _LOG_SQRT_2PI


def ll_mat_poisson(y, theta):
    return y[:, None] * np.log(theta)[None, :] - theta[None, :] - gammaln(y + 1.0)[:, None]


def ll_mat_gamma(y, theta, a):
    return (
        a * np.log(theta)[None, :]
        - theta[None, :] * y[:, None]
        + (a - 1.0) * np.log(y)[:, None]
        - gammaln(a)
    )


def ll_mat_binom(y, theta, m):
    lchoose = gammaln(m + 1.0) - gammaln(y + 1.0) - gammaln(m - y + 1.0)
    return (
        y[:, None] * np.log(theta)[None, :]
        + (m - y)[:, None] * np.log1p(-theta)[None, :]
        + lchoose[:, None]
    )


# ---------------------------------------------------------------------------
# EM on a row-scaled likelihood matrix A[i,j] = exp(ll[i,j] - rowmax[i])
#
# Returns (pi, sweeps, loglik trace, ok). The trace holds
# sum_i w_i log(A[i]@pi) per sweep; it differs from the true weighted
# log-likelihood by the constant sum_i w_i*rowmax[i].
#
# Weights decay geometrically once an atom is dominated; left alone they
# drift into the subnormal-float range, where x86 arithmetic slows the
# matmuls several-fold. Flushing below EM_FLUSH (a hundred orders of
# magnitude under the pruning threshold, so no recoverable weight is
# touched) keeps every sweep at full speed.

EM_FLUSH = 1e-110


def em_loop_np(A, w, pi0, tol, max_iter):
    pi = pi0.copy()
    W = w.sum()
    trace = np.empty(max_iter)
    it = 0
    for it in range(1, max_iter + 1):
        denom = A @ pi
        if np.any(denom <= 0.0):
            return pi, it, trace[: it - 1], False
        trace[it - 1] = float(w @ np.log(denom))
        pi_new = pi * (A.T @ (w / denom)) / W
        pi_new[pi_new < EM_FLUSH] = 0.0
        delta = np.max(np.abs(pi_new - pi))
        pi = pi_new
        if delta < tol:
            break
    return pi, it, trace[:it], True


def em_batch(A, Wmat, tol, max_iter):
    """Run independent EM fits for every weight column of Wmat at once.

    Couples the replicates into (n,m)@(m,B) GEMMs, which is far faster on
    one core than B separate matvec loops. Each column follows the exact
    sequential update; converged columns are frozen in place (GEMM columns
    are independent, so spectating columns cannot perturb the rest).
    BLAS-bound, hence shared by both backends. Returns
    (Pi (m,B), sweeps (B,), ok (B,)).
    """
    n, B = Wmat.shape
    m = A.shape[1]
    AT = np.ascontiguousarray(A.T)
    Pi = np.full((m, B), 1.0 / m)
    Wsum = Wmat.sum(axis=0)
    done = np.zeros(B, dtype=bool)
    ok = np.ones(B, dtype=bool)
    sweeps = np.zeros(B, dtype=np.int64)
    for it in range(1, max_iter + 1):
        D = A @ Pi
        bad = (D <= 0.0).any(axis=0) & ~done
        if bad.any():
            ok &= ~bad
            done |= bad
            D[:, bad] = 1.0
        Pi_new = Pi * (AT @ (Wmat / D)) / Wsum
        Pi_new[Pi_new < EM_FLUSH] = 0.0
        delta = np.abs(Pi_new - Pi).max(axis=0)
        np.copyto(Pi, Pi_new, where=~done)
        sweeps[~done] = it
        done |= delta < tol
        if done.all():
            break
    return Pi, sweeps, ok


def mix_objective_np(yv, wv, eta, off, base, T0, T1):
    """Weighted log mixture likelihood over equal-weight candidates.

    Adds sum_i wv[i]*(log mean_c f(yv[i]|theta_c) + base[i]) and
    accumulates the responsibility sums T0[c] += wv[i]*R[i,c] and
    T1[c] += wv[i]*R[i,c]*yv[i], from which every family's score-weighted
    gradient assembles as eta'(theta)*T1 + offset'(theta)*T0.
    """
    M = yv[:, None] * eta[None, :] + off[None, :]
    mrow = M.max(axis=1)
    E = np.exp(M - mrow[:, None])
    S = E.sum(axis=1)
    obj = float(wv @ (mrow + np.log(S) + base - math.log(eta.shape[0])))
    coef = wv / S
    T0 += E.T @ coef
    T1 += E.T @ (coef * yv)
    return obj


def logf_mean_draws_np(yv, etaT, offT):
    """(U, l) matrix of log (1/D) sum_d exp(y*etaT[k,d] + offT[k,d])."""
    M = yv[:, None, None] * etaT[None, :, :] + offT[None, :, :]
    m = M.max(axis=2)
    out = m + np.log(np.exp(M - m[:, :, None]).sum(axis=2)) - math.log(etaT.shape[1])
    return out


def kde_gauss_np(grid, x, wts, h):
    out = np.empty(grid.shape[0])
    c = 1.0 / (h * math.sqrt(2.0 * math.pi))
    step = max(1, int(2**22 // max(x.shape[0], 1)))
    for lo in range(0, grid.shape[0], step):
        z = (grid[lo : lo + step, None] - x[None, :]) / h
        out[lo : lo + step] = np.exp(-0.5 * z * z) @ wts
    return out * c


if HAVE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def em_loop_nb(A, w, pi0, tol, max_iter):
        n, m = A.shape
        pi = pi0.copy()
        acc = np.empty(m)
        W = 0.0
        for i in range(n):
            W += w[i]
        trace = np.empty(max_iter)
        it = 0
        for it in range(1, max_iter + 1):
            for j in range(m):
                acc[j] = 0.0
            ll = 0.0
            for i in range(n):
                d = 0.0
                for j in range(m):
                    d += A[i, j] * pi[j]
                if d <= 0.0:
                    return pi, it, trace[: it - 1], False
                ll += w[i] * np.log(d)
                c = w[i] / d
                for j in range(m):
                    acc[j] += c * A[i, j]
            trace[it - 1] = ll
            delta = 0.0
            for j in range(m):
                new = pi[j] * acc[j] / W
                if new < EM_FLUSH:
                    new = 0.0
                diff = abs(new - pi[j])
                if diff > delta:
                    delta = diff
                pi[j] = new
            if delta < tol:
                break
        return pi, it, trace[:it], True

    @njit(cache=True, fastmath=True)
    def mix_objective_nb(yv, wv, eta, off, base, T0, T1):
        n = yv.shape[0]
        C = eta.shape[0]
        row = np.empty(C)
        logC = np.log(C)
        obj = 0.0
        for i in range(n):
            y = yv[i]
            m = -1.0e308
            for c in range(C):
                v = y * eta[c] + off[c]
                row[c] = v
                if v > m:
                    m = v
            s = 0.0
            for c in range(C):
                e = np.exp(row[c] - m)
                row[c] = e
                s += e
            obj += wv[i] * (m + np.log(s) + base[i] - logC)
            coef = wv[i] / s
            cy = coef * y
            for c in range(C):
                T0[c] += coef * row[c]
                T1[c] += cy * row[c]
        return obj

    @njit(cache=True, fastmath=True)
    def logf_mean_draws_nb(yv, etaT, offT):
        U = yv.shape[0]
        L, D = etaT.shape
        out = np.empty((U, L))
        col = np.empty(D)
        logD = np.log(D)
        for u in range(U):
            y = yv[u]
            for k in range(L):
                m = -1.0e308
                for d in range(D):
                    v = y * etaT[k, d] + offT[k, d]
                    col[d] = v
                    if v > m:
                        m = v
                s = 0.0
                for d in range(D):
                    s += np.exp(col[d] - m)
                out[u, k] = m + np.log(s) - logD
        return out

    @njit(cache=True, fastmath=True)
    def kde_gauss_nb(grid, x, wts, h):
        G = grid.shape[0]
        N = x.shape[0]
        out = np.empty(G)
        c = 1.0 / (h * np.sqrt(2.0 * np.pi))
        for g in range(G):
            t = grid[g]
            acc = 0.0
            for j in range(N):
                z = (t - x[j]) / h
                acc += wts[j] * np.exp(-0.5 * z * z)
            out[g] = acc * c
        return out


if USE_NUMBA:
    em_loop = em_loop_nb
    mix_objective = mix_objective_nb
    logf_mean_draws = logf_mean_draws_nb
    kde_gauss = kde_gauss_nb
else:
    em_loop = em_loop_np
    mix_objective = mix_objective_np
    logf_mean_draws = logf_mean_draws_np
    kde_gauss = kde_gauss_np
