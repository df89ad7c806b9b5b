"""Shared oracles for the tests: brute-force solvers kept independent of
the library's own numerics."""

import numpy as np


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u * idx > (css - 1.0))[0][-1]
    tau = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - tau, 0.0)


def pg_simplex_npmle(A, w, tol: float = 1e-10, max_iter: int = 200_000):
    """Projected-gradient maximizer of sum_i w_i log(A[i] @ pi) on the simplex.

    Plain ascent with backtracking; concave objective, so this converges
    to the global maximum. Returns (pi, loglik).
    """
    A = np.asarray(A, dtype=float)
    w = np.asarray(w, dtype=float)
    m = A.shape[1]
    pi = np.full(m, 1.0 / m)

    def objective(p):
        denom = A @ p
        if np.any(denom <= 0):
            return -np.inf
        return float(w @ np.log(denom))

    obj = objective(pi)
    step = 1.0
    for _ in range(max_iter):
        grad = A.T @ (w / (A @ pi))
        improved = False
        for _ in range(60):
            cand = project_simplex(pi + step * grad)
            cobj = objective(cand)
            if cobj >= obj:
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        move = np.max(np.abs(cand - pi))
        gain = cobj - obj
        pi, obj = cand, cobj
        step *= 1.3
        if move < tol and gain < tol:
            break
    return pi, obj
