"""Detection by top-eigenvalue thresholding, recovery through the voting matrix,
and odd-order recovery from the top singular pair of the rectangular matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .combinat import binom, d_ell, neighbor_index_arrays
from .errors import ParameterError
from .kikuchi_matrix import build, ell_range
from .spectral import EigOptions, EigResult, SingularResult, canonical_sign, leading_eig, leading_singular
from .tensor_model import SubsetTensor, correlation


@dataclass(frozen=True)
class DetectionReport:
    lambda_max: float
    threshold: float
    verdict: str
    residual: float
    converged: bool

    @property
    def inconclusive(self) -> bool:
        return not self.converged

    def as_dict(self) -> dict:
        return {
            "lambda_max": self.lambda_max,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "residual": self.residual,
            "converged": self.converged,
        }


@dataclass(frozen=True, eq=False)
class RecoveryReport:
    x_hat: np.ndarray
    corr: float | None
    top_value: float
    residual: float
    converged: bool

    def as_dict(self) -> dict:
        return {
            "x_hat": self.x_hat.tolist(),
            "corr": self.corr,
            "top_value": self.top_value,
            "residual": self.residual,
            "converged": self.converged,
        }


def _check_even(tensor: SubsetTensor, ell: int) -> None:
    if tensor.p % 2:
        raise ParameterError(f"expected even p, got p={tensor.p}")
    lo, hi = ell_range(tensor.n, tensor.p)
    if not (lo <= ell <= hi):
        raise ParameterError(f"level l={ell} outside [{lo}, {hi}]")


def detect(tensor: SubsetTensor, ell: int, lam: float, opts: EigOptions | None = None,
           mode: str = "auto") -> DetectionReport:
    """Say ``planted`` iff the largest eigenvalue of M is at least ``lam * d_l / 2``."""
    _check_even(tensor, ell)
    if not lam > 0:
        raise ParameterError(f"the tested SNR must be positive, got {lam}")
    opts = opts or EigOptions()
    if opts.want != "value":
        raise ParameterError("detection thresholds the largest eigenvalue by value")
    m = build(tensor, ell, mode)
    res = leading_eig(m, opts)
    threshold = lam * d_ell(tensor.n, ell, tensor.p) / 2
    verdict = "planted" if res.value >= threshold else "null"
    return DetectionReport(res.value, threshold, verdict, res.residual, res.converged)


def voting_matrix(v: np.ndarray, n: int, ell: int) -> np.ndarray:
    """``V_ij = sum_{S: i in S, j not in S} v_S v_{S ^ {i,j}}``, zero diagonal.

    Integer input gives an exact integer result.
    """
    v = np.asarray(v)
    size = binom(n, ell)
    if v.shape != (size,):
        raise ParameterError(f"expected a vector of length {size}, got {v.shape}")
    if not (1 <= ell <= n - 1):
        return np.zeros((n, n), dtype=v.dtype)
    from .combinat import all_subsets, complements

    rows = all_subsets(n, ell)
    comp = complements(rows, n)
    out = np.zeros((n, n), dtype=np.result_type(v.dtype, np.int64))
    blocks = neighbor_index_arrays(n, ell, 1, 1)
    # blocks come in (drop position, add position) order
    for a in range(ell):
        for b in range(n - ell):
            cols, _ = next(blocks)
            np.add.at(out, (rows[:, a], comp[:, b]), v * v[cols])
    return out


def _finish(x: np.ndarray, spike) -> tuple[np.ndarray, float | None]:
    x = canonical_sign(x / np.linalg.norm(x))
    corr = None if spike is None else correlation(x, spike)
    return x, corr


def recover_even(tensor: SubsetTensor, ell: int, opts: EigOptions | None = None,
                 spike: np.ndarray | None = None, mode: str = "auto") -> RecoveryReport:
    """Top eigenvector of M, then the top eigenvector of its voting matrix."""
    _check_even(tensor, ell)
    m = build(tensor, ell, mode)
    top: EigResult = leading_eig(m, opts)
    votes = voting_matrix(top.vector, tensor.n, ell)
    _, vecs = np.linalg.eigh(votes)
    x, corr = _finish(vecs[:, -1], spike)
    return RecoveryReport(x, corr, top.value, top.residual, top.converged)


def round_odd(u: np.ndarray, v: np.ndarray, n: int, ell: int) -> np.ndarray:
    """``x_i = sum_{|S| = l, i not in S} u_S v_{S + i}``."""
    from .combinat import all_subsets, complements

    rows = all_subsets(n, ell)
    comp = complements(rows, n)
    out = np.zeros(n)
    blocks = neighbor_index_arrays(n, ell, 0, 1)
    for b in range(n - ell):
        cols, _ = next(blocks)
        np.add.at(out, comp[:, b], u * v[cols])
    return out


def recover_odd(tensor: SubsetTensor, ell: int, opts: EigOptions | None = None,
                spike: np.ndarray | None = None, mode: str = "auto") -> RecoveryReport:
    """Round the top singular pair ``(u, v = M^T u)`` of the rectangular matrix.

    A degenerate (all-zero) rounding is returned as the zero vector with
    ``corr = 0`` instead of raising.
    """
    if tensor.p % 2 == 0:
        raise ParameterError(f"expected odd p, got p={tensor.p}")
    lo, hi = ell_range(tensor.n, tensor.p)
    if not (lo <= ell <= hi):
        raise ParameterError(f"level l={ell} outside [{lo}, {hi}]")
    m = build(tensor, ell, mode)
    sv: SingularResult = leading_singular(m, opts)
    x = round_odd(sv.left, sv.right, tensor.n, ell)
    if not np.any(x):
        corr = None if spike is None else 0.0
        return RecoveryReport(x, corr, sv.sigma, sv.residual, sv.converged)
    x, corr = _finish(x, spike)
    return RecoveryReport(x, corr, sv.sigma, sv.residual, sv.converged)


def recover(tensor: SubsetTensor, ell: int, opts: EigOptions | None = None,
            spike: np.ndarray | None = None, mode: str = "auto") -> RecoveryReport:
    if tensor.p % 2:
        return recover_odd(tensor, ell, opts, spike, mode)
    return recover_even(tensor, ell, opts, spike, mode)
