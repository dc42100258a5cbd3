"""Independent reference computations used by several test modules."""

import numpy as np


def kl(p, q):
    p = np.asarray(p)
    if np.any(p <= 0):
        return np.inf
    return float(np.sum(p * np.log(p / q)))


def classical_minimum_kl(q, A, p_feasible, h0=0.1, h_min=1e-12, max_moves=200_000):
    """Minimize KL(p || q) subject to A p = A p_feasible and sum p = 1 by
    compass search over the null space of the constraints, refining the mesh
    until it is below ``h_min``.
    """
    cons = np.vstack([A, np.ones(len(q))])
    _, s, vt = np.linalg.svd(cons)
    rank = int(np.sum(s > 1e-12 * s[0]))
    basis = vt[rank:].T
    p = np.array(p_feasible, dtype=float)
    if basis.shape[1] == 0:
        return p
    best = kl(p, q)
    h = h0
    moves = 0
    dirs = np.hstack([basis, -basis]).T
    while h > h_min and moves < max_moves:
        improved = False
        for d in dirs:
            trial = p + h * d
            val = kl(trial, q)
            if val < best:
                p, best, improved = trial, val, True
                moves += 1
                break
        if not improved:
            h *= 0.5
    return p


def commutes(a, b, tol):
    return np.max(np.abs(a @ b - b @ a)) <= tol
