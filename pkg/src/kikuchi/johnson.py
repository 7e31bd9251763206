"""Exact spectrum of the Johnson-graph adjacency X and slice Fourier quantities.

X is the symmetric-difference matrix of the all-ones tensor: ``X[S, T] = 1``
iff ``|S ^ T| = p``. It is diagonalized by the spaces ``Y_m`` spanned by the
vectors ``u^phi`` below, with integer eigenvalues ``mu_m``. There are
``min(l, n - l) + 1`` such spaces; complementation maps level l to ``n - l``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .combinat import all_subsets, binom, d_ell, neighbor_index_arrays, rank_rows
from .errors import CapacityError, ParameterError
from .kikuchi_matrix import build
from .tensor_model import SubsetTensor

DENSE_CAP = 5000


def _check(n: int, ell: int, p: int) -> None:
    if p < 2 or p % 2:
        raise ParameterError(f"p must be a positive even integer, got {p}")
    if not (p // 2 <= ell <= n - p // 2):
        raise ParameterError(f"need p/2 <= l <= n - p/2, got n={n}, l={ell}, p={p}")


def num_eigenspaces(n: int, ell: int) -> int:
    return min(ell, n - ell) + 1


def eberlein(n: int, ell: int, p: int, m: int) -> int:
    """Eigenvalue ``mu_m`` of X on ``Y_m``, in exact integer arithmetic."""
    _check(n, ell, p)
    if not (0 <= m < num_eigenspaces(n, ell)):
        raise ParameterError(f"need 0 <= m <= min(l, n - l), got m={m}")
    h = p // 2
    return sum(
        (-1) ** s * binom(m, s) * binom(ell - m, h - s) * binom(n - ell - m, h - s)
        for s in range(min(m, h) + 1)
    )


def eigenspace_dim(n: int, m: int) -> int:
    return binom(n, m) - binom(n, m - 1)


@dataclass(frozen=True)
class JohnsonSpectrum:
    n: int
    ell: int
    p: int
    eigenvalues: tuple[int, ...]
    dims: tuple[int, ...]

    def multiset(self) -> np.ndarray:
        """Sorted eigenvalues of X repeated by multiplicity."""
        return np.sort(np.repeat(np.asarray(self.eigenvalues, dtype=float), self.dims))

    def rows(self):
        return list(zip(range(len(self.dims)), self.eigenvalues, self.dims))


def spectrum(n: int, ell: int, p: int) -> JohnsonSpectrum:
    _check(n, ell, p)
    ms = range(num_eigenspaces(n, ell))
    return JohnsonSpectrum(
        n, ell, p,
        tuple(eberlein(n, ell, p, m) for m in ms),
        tuple(eigenspace_dim(n, m) for m in ms),
    )


def adjacency(n: int, ell: int, p: int, mode: str = "explicit"):
    """X as a :class:`KikuchiMatrix` over the all-ones tensor."""
    _check(n, ell, p)
    ones = SubsetTensor(n, p, np.ones(binom(n, p)))
    return build(ones, ell, mode)


def _check_phi(n: int, phi: Sequence[int]) -> tuple[int, ...]:
    phi = tuple(int(a) for a in phi)
    if len(phi) % 2:
        raise ParameterError("phi must have even length (pairs a_i, b_i)")
    if len(set(phi)) != len(phi):
        raise ParameterError(f"phi entries must be distinct, got {phi}")
    if any(not (0 <= a < n) for a in phi):
        raise ParameterError(f"phi entries must lie in [0, {n})")
    return phi


def phi_vector(n: int, ell: int, phi: Sequence[int]) -> np.ndarray:
    """``u^phi_S = prod_i (1[a_i in S] - 1[b_i in S])`` over l-subsets S."""
    phi = _check_phi(n, phi)
    if len(phi) // 2 > ell:
        raise ParameterError("phi has more pairs than l")
    rows = all_subsets(n, ell)
    member = np.zeros((rows.shape[0], n), dtype=np.int64)
    member[np.repeat(np.arange(rows.shape[0]), ell), rows.ravel()] = 1
    out = np.ones(rows.shape[0], dtype=np.int64)
    for a, b in zip(phi[::2], phi[1::2]):
        out *= member[:, a] - member[:, b]
    return out.astype(float)


def project_onto_low_eigenspaces(v: np.ndarray, n: int, ell: int, m: int, p: int = 2
                                 ) -> tuple[np.ndarray, np.ndarray]:
    """Split ``v`` into its component in ``Y_0 + ... + Y_m`` and the orthogonal rest.

    Uses a dense eigendecomposition of X for order ``p``; eigenvectors are
    assigned to spaces by nearest ``mu_s``, which requires distinct ``mu_s``
    (always true for ``p = 2``).
    """
    _check(n, ell, p)
    v = np.asarray(v, dtype=float)
    size = binom(n, ell)
    if v.shape != (size,):
        raise ParameterError(f"expected a vector of length {size}, got {v.shape}")
    if size > DENSE_CAP:
        raise CapacityError(f"dense diagonalization of size {size} exceeds {DENSE_CAP}")
    mus = np.asarray(spectrum(n, ell, p).eigenvalues, dtype=float)
    if len(np.unique(mus)) != len(mus):
        raise ParameterError(f"eigenvalues for p={p} are not distinct; use another p")
    vals, vecs = np.linalg.eigh(adjacency(n, ell, p).to_dense())
    label = np.argmin(np.abs(vals[:, None] - mus[None, :]), axis=1)
    low = vecs[:, label <= m]
    v_low = low @ (low.T @ v)
    return v_low, v - v_low


def exchange(v: np.ndarray, n: int, ell: int, i: int, j: int) -> np.ndarray:
    """``v^(ij)``: swap the roles of i and j wherever exactly one lies in S."""
    rows = all_subsets(n, ell)
    has_i = np.any(rows == i, axis=1)
    has_j = np.any(rows == j, axis=1)
    swapped = np.where(rows == i, j, np.where(rows == j, i, rows))
    swapped = np.sort(swapped, axis=1)
    idx = rank_rows(swapped)
    out = np.array(v, dtype=float, copy=True)
    one = has_i ^ has_j
    out[one] = np.asarray(v, dtype=float)[idx[one]]
    return out


def influence(v: np.ndarray, n: int, ell: int) -> float:
    """Total influence ``(1/n) sum_{i<j} (1/2) E_S[(v^(ij)_S - v_S)^2]``."""
    v = np.asarray(v, dtype=float)
    if v.shape != (binom(n, ell),):
        raise ParameterError(f"expected a vector of length {binom(n, ell)}, got {v.shape}")
    # each (S, a in S, b not in S) is one unordered pair {a, b} with |S & {a,b}| = 1
    total = 0.0
    for cols, _ in neighbor_index_arrays(n, ell, 1, 1):
        total += float(np.sum((v[cols] - v) ** 2))
    return total / (2.0 * n * v.size)


def slice_variance(v: np.ndarray) -> float:
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        raise ParameterError("variance of an empty vector")
    return float(np.mean(v**2) - np.mean(v) ** 2)


def degree(n: int, ell: int, p: int) -> int:
    """``mu_0``, the vertex degree of the Johnson graph."""
    return d_ell(n, ell, p)
