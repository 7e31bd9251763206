"""Order-l symmetric-difference matrices built from a :class:`SubsetTensor`.

Rows and columns are l-subsets of [n] in colex order. For even p the matrix is
square with ``M[S, T] = Y[S ^ T]`` when ``|S ^ T| = p``. For odd p, columns are
(l+1)-subsets and the same rule applies, giving a ``C(n,l) x C(n,l+1)`` matrix.

``implicit`` mode keeps only the tensor and regenerates neighbor indices on
every product, visiting (drop, add) choices in a fixed order.
``explicit`` mode materializes a CSR matrix. The two agree up to floating-point
reassociation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
import scipy.sparse as sp

from .combinat import binom, neighbor_index_arrays
from .errors import CapacityError, ParameterError
from .tensor_model import SubsetTensor, spike_products

MODES = ("implicit", "explicit", "auto")
EXPLICIT_NNZ_CAP = 10**8
AUTO_EXPLICIT_NNZ = 10**7


def ell_range(n: int, p: int) -> tuple[int, int]:
    """Inclusive range of admissible levels l for order p."""
    return p // 2, n - (p + 1) // 2


@dataclass(frozen=True, eq=False)
class KikuchiMatrix:
    tensor: SubsetTensor
    ell: int
    mode: str = "implicit"
    csr: sp.csr_matrix | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.tensor.n

    @property
    def p(self) -> int:
        return self.tensor.p

    @property
    def square(self) -> bool:
        return self.p % 2 == 0

    @property
    def shape(self) -> tuple[int, int]:
        cols = self.ell if self.square else self.ell + 1
        return binom(self.n, self.ell), binom(self.n, cols)

    @property
    def row_degree(self) -> int:
        """Structural nonzeros per row."""
        return binom(self.ell, self.p // 2) * binom(self.n - self.ell, (self.p + 1) // 2)

    @property
    def nnz(self) -> int:
        return self.shape[0] * self.row_degree

    def _blocks(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        return neighbor_index_arrays(self.n, self.ell, self.p // 2, (self.p + 1) // 2)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.shape[1],):
            raise ParameterError(f"expected a vector of length {self.shape[1]}, got {v.shape}")
        if self.csr is not None:
            return self.csr @ v
        y = self.tensor.entries
        out = np.zeros(self.shape[0])
        for cols, diffs in self._blocks():
            out += y[diffs] * v[cols]
        return out

    def rmatvec(self, u: np.ndarray) -> np.ndarray:
        """Transpose product; equal to :meth:`matvec` for even p."""
        u = np.asarray(u, dtype=float)
        if u.shape != (self.shape[0],):
            raise ParameterError(f"expected a vector of length {self.shape[0]}, got {u.shape}")
        if self.square:
            return self.matvec(u)
        if self.csr is not None:
            return self.csr.T @ u
        y = self.tensor.entries
        out = np.zeros(self.shape[1])
        for cols, diffs in self._blocks():
            out += np.bincount(cols, weights=y[diffs] * u, minlength=self.shape[1])
        return out

    def to_sparse(self) -> sp.csr_matrix:
        if self.csr is not None:
            return self.csr
        rows_idx = np.arange(self.shape[0])
        rows, cols, vals = [], [], []
        y = self.tensor.entries
        for c, d in self._blocks():
            rows.append(rows_idx)
            cols.append(c)
            vals.append(y[d])
        if not rows:
            return sp.csr_matrix(self.shape)
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=self.shape,
        )

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()


def build(tensor: SubsetTensor, ell: int, mode: str = "implicit",
          nnz_cap: int = EXPLICIT_NNZ_CAP) -> KikuchiMatrix:
    """Symmetric-difference matrix of level ``ell`` over ``tensor``.

    ``mode="auto"`` materializes when the entry count is at most
    ``AUTO_EXPLICIT_NNZ`` (and within ``nnz_cap``), else stays implicit.
    """
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    lo, hi = ell_range(tensor.n, tensor.p)
    if not (lo <= ell <= hi):
        raise ParameterError(
            f"level l={ell} outside [{lo}, {hi}] for n={tensor.n}, p={tensor.p}"
        )
    m = KikuchiMatrix(tensor, ell, "implicit")
    if mode == "auto":
        mode = "explicit" if m.nnz <= min(AUTO_EXPLICIT_NNZ, nnz_cap) else "implicit"
    if mode == "explicit":
        if m.nnz > nnz_cap:
            raise CapacityError(f"{m.nnz} stored entries exceed the cap of {nnz_cap}")
        return KikuchiMatrix(tensor, ell, "explicit", m.to_sparse())
    return m


def conjugate_by_spike(m: KikuchiMatrix, x: np.ndarray) -> KikuchiMatrix:
    """The matrix with entries ``x^S x^T M[S, T]``; same spectrum as ``m`` (even p).

    Since ``x^S x^T = x^(S ^ T)`` for +-1 vectors, this is the matrix of the
    tensor with entries ``x^E Y_E``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (m.n,) or not np.all(np.abs(x) == 1):
        raise ParameterError("conjugation needs a +-1 vector of length n")
    if not m.square:
        raise ParameterError("conjugation by the spike is defined for even p")
    return build(m.tensor.scaled(spike_products(x, m.p)), m.ell, m.mode)


def write_triplets(m: KikuchiMatrix, path) -> None:
    """Write the stored entries as ``row col value`` lines with round-trip floats."""
    coo = m.to_sparse().tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        for i in order:
            fh.write(f"{int(coo.row[i])} {int(coo.col[i])} {float(coo.data[i])!r}\n")


def read_triplets(path, shape: tuple[int, int]) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    with open(path) as fh:
        for line in fh:
            r, c, v = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(v))
    return sp.csr_matrix((vals, (rows, cols)), shape=shape)
