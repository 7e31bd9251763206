"""Spectral refutation of random k-XOR formulas with even k.

A clause ``(U, b)`` asks for ``x^U = b``. Summing ``b_i`` over clauses with the
same subset gives a tensor ``w`` on k-subsets, and the symmetric-difference
matrix of ``w`` at level l certifies

    max_x P(x) <= m/2 + C(n,k) ||M|| / (2 d_l)

for every formula, where ``P(x)`` counts satisfied clauses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .combinat import binom, d_ell, rank_rows
from .errors import CapacityError, ParameterError
from .kikuchi_matrix import build, ell_range
from .spectral import EigOptions, leading_eig
from .tensor_model import SubsetTensor

BRUTE_FORCE_MAX_N = 24


@dataclass(frozen=True, eq=False)
class XorFormula:
    n: int
    k: int
    subsets: np.ndarray  # (m, k) sorted 0-based variable indices
    signs: np.ndarray  # (m,) entries +-1

    def __post_init__(self) -> None:
        subsets = np.asarray(self.subsets, dtype=np.int64).reshape(-1, self.k)
        signs = np.asarray(self.signs, dtype=np.int64).reshape(-1)
        if subsets.shape[0] != signs.shape[0]:
            raise ParameterError("need one sign per clause")
        if self.k < 1 or self.k > self.n:
            raise ParameterError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if subsets.size and (subsets.min() < 0 or subsets.max() >= self.n):
            raise ParameterError(f"variable indices must lie in [0, {self.n})")
        subsets = np.sort(subsets, axis=1)
        if self.k > 1 and np.any(np.diff(subsets, axis=1) == 0):
            raise ParameterError("clause variables must be distinct")
        if not np.all(np.abs(signs) == 1):
            raise ParameterError("clause right-hand sides must be +-1")
        subsets.setflags(write=False)
        signs.setflags(write=False)
        object.__setattr__(self, "subsets", subsets)
        object.__setattr__(self, "signs", signs)

    @property
    def m(self) -> int:
        return int(self.signs.shape[0])

    def negated(self) -> "XorFormula":
        return XorFormula(self.n, self.k, self.subsets, -self.signs)


@dataclass(frozen=True)
class RefutationCertificate:
    m: int
    ell: int
    norm_estimate: float
    residual: float
    norm_upper: float
    bound: float
    converged: bool
    used_row_sum: bool

    @property
    def ratio(self) -> float:
        return self.bound / self.m if self.m else math.inf

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "ell": self.ell,
            "norm_estimate": self.norm_estimate,
            "residual": self.residual,
            "norm_upper": self.norm_upper,
            "bound": self.bound,
            "ratio": self.ratio if self.m else None,
            "converged": self.converged,
            "used_row_sum": self.used_row_sum,
        }


def random_formula(n: int, k: int, m: int, seed: int = 0) -> XorFormula:
    """``m`` clauses with i.i.d. uniform k-subsets (with replacement) and uniform signs."""
    if k < 2 or k % 2 or k > n:
        raise ParameterError(f"need even 2 <= k <= n, got k={k}, n={n}")
    if m < 0:
        raise ParameterError(f"m must be non-negative, got {m}")
    gen = rng.stream(seed, "xor-clauses")
    # uniform k-subsets by sorting the first k entries of independent random keys
    subsets = np.sort(np.argsort(gen.random((m, n)), axis=1)[:, :k], axis=1)
    signs = rng.signs(rng.stream(seed, "xor-signs"), m).astype(np.int64)
    return XorFormula(n, k, subsets, signs)


def _check_assignment(formula: XorFormula, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (formula.n,) or not np.all(np.abs(x) == 1):
        raise ParameterError(f"assignment must be a +-1 vector of length {formula.n}")
    return x.astype(np.int64)


def count_satisfied(formula: XorFormula, x) -> int:
    x = _check_assignment(formula, x)
    if formula.m == 0:
        return 0
    return int(np.sum(np.prod(x[formula.subsets], axis=1) == formula.signs))


def clause_weights(formula: XorFormula) -> np.ndarray:
    """``w_E = sum of b_i over clauses with U_i = E``, indexed by colex rank of E."""
    out = np.zeros(binom(formula.n, formula.k))
    if formula.m:
        np.add.at(out, rank_rows(formula.subsets), formula.signs.astype(float))
    return out


def clause_tensor(formula: XorFormula) -> SubsetTensor:
    return SubsetTensor(formula.n, formula.k, clause_weights(formula))


def row_sum_bound(formula: XorFormula, ell: int) -> float:
    """``max_S sum_T |M[S, T]|``, an upper bound on ``||M||`` for symmetric M."""
    absolute = build(SubsetTensor(formula.n, formula.k, np.abs(clause_weights(formula))), ell, "auto")
    return float(np.max(absolute.matvec(np.ones(absolute.shape[1]))))


def refute(formula: XorFormula, ell: int, opts: EigOptions | None = None,
           mode: str = "auto") -> RefutationCertificate:
    """Certified upper bound on the number of simultaneously satisfiable clauses.

    ``||M||`` is taken as ``|theta| + residual`` for the leading-by-magnitude
    Ritz pair. If the solver does not converge the row-sum bound is used
    instead, which is always valid.
    """
    n, k = formula.n, formula.k
    if k % 2:
        raise ParameterError(f"refutation needs even k, got k={k}")
    lo, hi = ell_range(n, k)
    if not (lo <= ell <= hi):
        raise ParameterError(f"level l={ell} outside [{lo}, {hi}] for n={n}, k={k}")
    opts = opts or EigOptions()
    opts = EigOptions(opts.tol, opts.max_iters, opts.seed, "magnitude", opts.method, opts.krylov_dim)
    scale = binom(n, k) / (2.0 * d_ell(n, ell, k))
    if formula.m == 0:
        return RefutationCertificate(0, ell, 0.0, 0.0, 0.0, 0.0, True, False)
    mat = build(clause_tensor(formula), ell, mode)
    res = leading_eig(mat, opts)
    theta = abs(res.value)
    upper = theta + res.residual
    used_row_sum = False
    if not res.converged:
        upper = row_sum_bound(formula, ell)
        used_row_sum = True
    bound = formula.m / 2 + scale * upper
    return RefutationCertificate(formula.m, ell, theta, res.residual, upper, bound,
                                 res.converged, used_row_sum)


def refutation_regime_m(n: int, k: int, ell: int, beta: float) -> int:
    """Clause count ``ceil(4 e^2 C(n,k) log C(n,l) / (beta^2 d_l))`` where the bound becomes strong."""
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    return math.ceil(4 * math.e**2 * binom(n, k) * math.log(binom(n, ell))
                     / (beta**2 * d_ell(n, ell, k)))


def hypercube(n: int) -> np.ndarray:
    """All ``2^n`` sign vectors as rows, bit i of the row index giving coordinate i."""
    if n > BRUTE_FORCE_MAX_N:
        raise CapacityError(f"exhaustive search over 2^{n} points exceeds 2^{BRUTE_FORCE_MAX_N}")
    bits = (np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def brute_force_max_satisfied(formula: XorFormula) -> int:
    """``max_x P(x)`` by enumerating every assignment (blocked over clauses)."""
    if formula.m == 0:
        return 0
    cube = hypercube(formula.n)
    counts = np.zeros(cube.shape[0], dtype=np.int64)
    for start in range(0, formula.m, 64):
        sub = formula.subsets[start:start + 64]
        signs = formula.signs[start:start + 64]
        prods = np.prod(cube[:, sub], axis=2, dtype=np.int64)
        counts += np.sum(prods == signs[None, :], axis=1)
    return int(counts.max())
