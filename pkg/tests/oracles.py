"""Slow, independent reference implementations used only by the tests.

Nothing here imports the numerical routines under test; subsets are handled
with plain tuples and itertools, and dense spectra come from hand-written
Jacobi iterations rather than LAPACK.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def colex_subsets(n, k):
    """k-subsets of range(n) as sorted tuples, in colex order (sort by reversed tuple)."""
    return sorted(itertools.combinations(range(n), k), key=lambda s: tuple(reversed(s)))


def naive_kikuchi(n, p, ell, value):
    """Dense symmetric-difference matrix; ``value(E)`` gives the entry for a p-subset E."""
    rows = colex_subsets(n, ell)
    cols = colex_subsets(n, ell if p % 2 == 0 else ell + 1)
    out = np.zeros((len(rows), len(cols)))
    for i, s in enumerate(rows):
        for j, t in enumerate(cols):
            diff = tuple(sorted(set(s) ^ set(t)))
            if len(diff) == p:
                out[i, j] = value(diff)
    return out


def naive_voting(v, n, ell):
    rows = colex_subsets(n, ell)
    index = {s: r for r, s in enumerate(rows)}
    out = [[0] * n for _ in range(n)]
    for s in rows:
        for i in s:
            for j in range(n):
                if j in s:
                    continue
                t = tuple(sorted((set(s) - {i}) | {j}))
                out[i][j] += v[index[s]] * v[index[t]]
    return np.array(out, dtype=object if isinstance(v[0], int) else float)


def naive_contract(y, u):
    n, p = y.shape[0], y.ndim
    out = np.zeros(n)
    for i in range(n):
        for rest in itertools.product(range(n), repeat=p - 1):
            out[i] += y[(i,) + rest] * math.prod(u[j] for j in rest)
    return out


def jacobi_eigvalsh(a, sweeps=100, tol=1e-13):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    for _ in range(sweeps):
        off = math.sqrt(float(np.sum((a - np.diag(np.diag(a))) ** 2)))
        if off <= tol * max(1.0, float(np.abs(a).max())):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * ap - s * aq, s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * ap - s * aq, s * ap + c * aq
    return np.sort(np.diag(a))


def jacobi_singular_values(a, sweeps=60, tol=1e-15):
    """Singular values by one-sided Jacobi orthogonalization of the columns."""
    u = np.array(a, dtype=float)
    if u.shape[0] < u.shape[1]:
        u = u.T.copy()
    n = u.shape[1]
    for _ in range(sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = float(u[:, p] @ u[:, p])
                beta = float(u[:, q] @ u[:, q])
                gamma = float(u[:, p] @ u[:, q])
                if abs(gamma) <= tol * math.sqrt(alpha * beta) or gamma == 0:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1 + zeta * zeta))
                c = 1 / math.sqrt(1 + t * t)
                s = c * t
                up = u[:, p].copy()
                u[:, p] = c * up - s * u[:, q]
                u[:, q] = s * up + c * u[:, q]
        if not rotated:
            break
    return np.sort(np.linalg.norm(u, axis=0))[::-1]


def brute_max_satisfied(n, clauses):
    """clauses: list of (tuple of vars, sign)."""
    best = 0
    for x in itertools.product((1, -1), repeat=n):
        sat = sum(1 for u, b in clauses if math.prod(x[i] for i in u) == b)
        best = max(best, sat)
    return best
