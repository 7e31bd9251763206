"""Certified upper bounds on the hypercube injective norm of odd-order tensors.

For ``p = 2q + 1`` and unit ``x``, Cauchy-Schwarz over the last index gives
``<Y, x^p>^2 <= <T, x^{4q}>`` with ``T_abcd = sum_e Y_ace Y_bde`` (a, b, c, d
in ``[n]^q``). The part of T with ``ac = bd`` contributes at most n on the
scaled hypercube; the rest, ``T~``, is spread over an ``n^l x n^l`` matrix M
on l-tuples so that

    n^l <x^l, M x^l> = n^{2q} <T~, x^{4q}>   for x in {+-1}^n / sqrt(n),

which yields ``||Y||_+- <= sqrt(n) + n^{l/2 - q} ||M||^{1/2}``.

Tuple pairs (S, T) related through (a, b, c, d): there are 2q distinct
positions (in any order) where S reads ``ab`` and T reads ``cd``, or the
other way round, S and T agree elsewhere, and the values used by a, b, c, d
appear nowhere else in S or T. Each pair is counted once per (a, b, c, d) and
the weight is ``T~_abcd / N_abcd`` with ``N_abcd`` the number of such pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations, product

import numpy as np
import scipy.sparse as sp

from . import rng
from .errors import CapacityError, ParameterError
from .spectral import EigOptions, leading_eig
from .tensor_model import DenseSymmetricTensor
from .xor_refute import hypercube

DIM_CAP = 10**6
CANDIDATE_CAP = 5 * 10**7


def _order(tensor) -> tuple[np.ndarray, int, int, int]:
    y = tensor.values if isinstance(tensor, DenseSymmetricTensor) else np.asarray(tensor, dtype=float)
    p = y.ndim
    if p < 3 or p % 2 == 0:
        raise ParameterError(f"expected an odd order p >= 3, got p={p}")
    if len(set(y.shape)) != 1:
        raise ParameterError(f"expected an n x ... x n array, got shape {y.shape}")
    return y, y.shape[0], p, (p - 1) // 2


def lifted_tensor(tensor) -> np.ndarray:
    """``T~`` as an array of shape ``(n^q,) * 4`` indexed by (a, b, c, d)."""
    y, n, _, q = _order(tensor)
    yr = y.reshape(n**q, n**q, n)
    t = np.einsum("ace,bde->abcd", yr, yr)
    # drop the entries with a == b and c == d, i.e. (a, c) == (b, d)
    idx = np.arange(n**q)
    t[idx[:, None], idx[:, None], idx[None, :], idx[None, :]] = 0.0
    return t


def _digits(idx: np.ndarray, n: int, width: int) -> np.ndarray:
    """Base-n digits (most significant first) of each index."""
    out = np.empty(idx.shape + (width,), dtype=np.int64)
    rest = idx.copy()
    for j in range(width - 1, -1, -1):
        out[..., j] = rest % n
        rest //= n
    return out


def _encode(rows: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(rows.shape[1]):
        out = out * n + rows[:, j]
    return out


@dataclass(frozen=True, eq=False)
class LiftedOperator:
    n: int
    p: int
    ell: int
    matrix: sp.csr_matrix
    counts: np.ndarray  # N for each (a, b, c, d) with nonzero T~, same order as ``keys``
    keys: np.ndarray  # flat (a, b, c, d) indices with nonzero T~

    @property
    def q(self) -> int:
        return (self.p - 1) // 2

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=float)


def _pairs_for(abcd: np.ndarray, n: int, q: int, ell: int):
    """All related (S, T) code pairs per (a, b, c, d), deduplicated.

    Returns ``(owner, s_code, t_code)`` with ``owner`` indexing rows of ``abcd``.
    """
    k = abcd.shape[0]
    ab, cd = abcd[:, : 2 * q], abcd[:, 2 * q:]
    free_len = ell - 2 * q
    n_positions = math.perm(ell, 2 * q)
    total = k * n_positions * 2 * n**free_len
    if total > CANDIDATE_CAP:
        raise CapacityError(f"{total} candidate tuple pairs exceed the cap of {CANDIDATE_CAP}")
    fillers = np.array(list(product(range(n), repeat=free_len)), dtype=np.int64)
    fillers = fillers.reshape(n**free_len, free_len)
    # a filler is admissible for (a, b, c, d) iff it avoids all of their values
    used = np.zeros((k, n), dtype=bool)
    used[np.repeat(np.arange(k), 4 * q), abcd.ravel()] = True
    ok = ~np.any(used[:, fillers], axis=2) if free_len else np.ones((k, 1), dtype=bool)
    owner_f, filler_f = np.nonzero(ok)
    owners, s_codes, t_codes = [], [], []
    for positions in permutations(range(ell), 2 * q):
        others = [i for i in range(ell) if i not in positions]
        for left, right in ((ab, cd), (cd, ab)):
            s = np.empty((owner_f.size, ell), dtype=np.int64)
            t = np.empty_like(s)
            s[:, positions] = left[owner_f]
            t[:, positions] = right[owner_f]
            if free_len:
                s[:, others] = fillers[filler_f]
                t[:, others] = fillers[filler_f]
            owners.append(owner_f)
            s_codes.append(_encode(s, n))
            t_codes.append(_encode(t, n))
    owner = np.concatenate(owners)
    s_code = np.concatenate(s_codes)
    t_code = np.concatenate(t_codes)
    triples = np.unique(np.stack([owner, s_code, t_code], axis=1), axis=0)
    return triples[:, 0], triples[:, 1], triples[:, 2]


def pair_counts(n: int, p: int, ell: int, abcd) -> np.ndarray:
    """``N`` for each row of ``abcd`` (shape ``(k, 4q)``), by explicit enumeration."""
    q = (p - 1) // 2
    abcd = np.asarray(abcd, dtype=np.int64).reshape(-1, 4 * q)
    owner, _, _ = _pairs_for(abcd, n, q, ell)
    return np.bincount(owner, minlength=abcd.shape[0])


def n_bar(n: int, p: int, ell: int) -> int:
    """Lower bound ``C(l, 2q) (n - 4q)^(l - 2q)`` on every pair count."""
    q = (p - 1) // 2
    return math.comb(ell, 2 * q) * max(n - 4 * q, 0) ** (ell - 2 * q)


def build_lifted_operator(tensor, ell: int, dim_cap: int = DIM_CAP) -> LiftedOperator:
    y, n, p, q = _order(tensor)
    if ell < p - 1:
        raise ParameterError(f"need l >= p - 1 = {p - 1}, got l={ell}")
    if n**ell > dim_cap:
        raise CapacityError(f"dimension n^l = {n**ell} exceeds the cap of {dim_cap}")
    t = lifted_tensor(y)
    flat = t.ravel()
    keys = np.flatnonzero(flat)
    abcd = _digits(keys, n, 4 * q)
    owner, s_code, t_code = _pairs_for(abcd, n, q, ell)
    counts = np.bincount(owner, minlength=keys.size)
    if np.any(counts == 0):
        raise ParameterError("some (a, b, c, d) admit no related tuple pair; increase n or l")
    weights = flat[keys][owner] / counts[owner]
    dim = n**ell
    m = sp.coo_matrix((weights, (s_code, t_code)), shape=(dim, dim)).tocsr()
    m.sum_duplicates()
    # the relation is symmetric; averaging removes summation-order rounding
    m = ((m + m.T) * 0.5).tocsr()
    return LiftedOperator(n, p, ell, m, counts, keys)


@dataclass(frozen=True)
class OddCertificate:
    n: int
    p: int
    ell: int
    norm_estimate: float
    residual: float
    norm_upper: float
    bound: float
    converged: bool
    used_row_sum: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def certify_rademacher_norm(tensor, ell: int, opts: EigOptions | None = None,
                            dim_cap: int = DIM_CAP) -> OddCertificate:
    """Sound upper bound ``sqrt(n) + n^{l/2 - q} (|theta| + residual)^{1/2}`` on ``||Y||_+-``.

    Falls back to the row-sum bound on ``||M||`` if the solver does not converge.
    """
    op = build_lifted_operator(tensor, ell, dim_cap)
    opts = opts or EigOptions()
    opts = EigOptions(opts.tol, opts.max_iters, opts.seed, "magnitude", opts.method, opts.krylov_dim)
    res = leading_eig(op.matrix, opts)
    theta = abs(res.value)
    upper = theta + res.residual
    used_row_sum = False
    if not res.converged:
        upper = float(np.max(np.abs(op.matrix).sum(axis=1)))
        used_row_sum = True
    n, q = op.n, op.q
    bound = math.sqrt(n) + n ** (ell / 2 - q) * math.sqrt(upper)
    return OddCertificate(n, op.p, ell, theta, res.residual, upper, bound, res.converged, used_row_sum)


def rademacher_form(tensor, x: np.ndarray) -> float:
    """``<Y, x^p>`` for one vector x."""
    y = tensor.values if isinstance(tensor, DenseSymmetricTensor) else np.asarray(tensor, dtype=float)
    out = y
    for _ in range(y.ndim):
        out = out @ np.asarray(x, dtype=float)
    return float(out)


def brute_force_rademacher_norm(tensor, block: int = 4096) -> float:
    """``max over x in {+-1}^n / sqrt(n)`` of ``|<Y, x^p>|`` by enumeration."""
    y = tensor.values if isinstance(tensor, DenseSymmetricTensor) else np.asarray(tensor, dtype=float)
    n, p = y.shape[0], y.ndim
    cube = hypercube(n)
    best = 0.0
    for start in range(0, cube.shape[0], block):
        x = cube[start:start + block].astype(float)  # (b, n)
        out = y.reshape(-1, n) @ x.T  # contract last index: (n^{p-1}, b)
        for j in range(p - 1):
            out = np.einsum("rib,bi->rb", out.reshape(-1, n, x.shape[0]), x)
        best = max(best, float(np.max(np.abs(out))))
    return best / n ** (p / 2)


def lift_identity_sides(op: LiftedOperator, tensor, x: np.ndarray) -> tuple[float, float]:
    """Both sides of ``n^l <x^l, M x^l> = n^{2q} <T~, x^{4q}>`` for a scaled sign vector x."""
    n, q, ell = op.n, op.q, op.ell
    x = np.asarray(x, dtype=float)
    xl = x
    for _ in range(ell - 1):
        xl = np.multiply.outer(xl, x).ravel()
    left = n**ell * float(xl @ op.matvec(xl))
    t = lifted_tensor(tensor)
    xq = x
    for _ in range(q - 1):
        xq = np.multiply.outer(xq, x).ravel()
    right = n ** (2 * q) * float(np.einsum("abcd,a,b,c,d->", t, xq, xq, xq, xq))
    return left, right


def random_sign_tensor(n: int, p: int, seed: int = 0) -> np.ndarray:
    """I.i.d. uniform +-1 entries in an asymmetric ``n^p`` array."""
    return rng.signs(rng.stream(seed, "sign-tensor"), n**p).reshape((n,) * p).astype(float)
