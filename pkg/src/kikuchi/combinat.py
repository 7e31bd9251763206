"""Colexicographic indexing of l-subsets of [n] and symmetric-difference neighbors.

Subsets are represented as strictly increasing tuples (or rows of an integer
array) of 0-based elements. The colex rank of ``s = (e_0 < ... < e_{l-1})`` is
``sum_i C(e_i, i + 1)``, so the first subsets in order are
``{0,1}, {0,2}, {1,2}, {0,3}, ...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .errors import CapacityError, InvalidSubsetError, ParameterError

MAX_N = 128
_INT64_MAX = np.iinfo(np.int64).max


def binom(n: int, k: int) -> int:
    """Exact binomial coefficient, zero outside ``0 <= k <= n``."""
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def _build_table() -> np.ndarray:
    # entries that overflow int64 are stored as -1 and never read for valid input
    table = np.full((MAX_N + 1, MAX_N + 1), -1, dtype=np.int64)
    for n in range(MAX_N + 1):
        for k in range(MAX_N + 1):
            c = binom(n, k)
            if c <= _INT64_MAX:
                table[n, k] = c
    return table


BINOM_TABLE = _build_table()


def d_ell(n: int, ell: int, p: int) -> int:
    """Row degree C(n - l, p/2) * C(l, p/2) of the even-order symmetric-difference matrix."""
    if p < 0 or p % 2:
        raise ParameterError(f"p must be a non-negative even integer, got {p}")
    h = p // 2
    if not (0 <= h <= ell and h <= n - ell):
        raise ParameterError(f"need p/2 <= l <= n - p/2, got n={n}, l={ell}, p={p}")
    return binom(n - ell, h) * binom(ell, h)


def rank_rows(arr: np.ndarray) -> np.ndarray:
    """Vectorized colex rank of each row of a sorted integer array."""
    arr = np.asarray(arr, dtype=np.int64)
    if arr.ndim != 2:
        raise ParameterError("rank_rows expects a 2-d array")
    out = np.zeros(arr.shape[0], dtype=np.int64)
    for j in range(arr.shape[1]):
        out += BINOM_TABLE[arr[:, j], j + 1]
    return out


@lru_cache(maxsize=64)
def _all_subsets_cached(n: int, k: int) -> np.ndarray:
    if k == 0:
        out = np.zeros((1, 0), dtype=np.int64)
    else:
        arr = np.fromiter(
            (e for c in combinations(range(n), k) for e in c), dtype=np.int64
        ).reshape(-1, k)
        # np.lexsort treats the last key as primary: largest element first = colex
        out = arr[np.lexsort(arr.T)]
    out.setflags(write=False)
    return out


def all_subsets(n: int, k: int) -> np.ndarray:
    """All k-subsets of [n] as a read-only ``(C(n,k), k)`` array in colex order."""
    if not (0 <= k <= n):
        raise ParameterError(f"need 0 <= k <= n, got n={n}, k={k}")
    return _all_subsets_cached(n, k)


def complements(rows: np.ndarray, n: int) -> np.ndarray:
    """Sorted complement in [n] of every row of ``rows``."""
    r, k = rows.shape
    mask = np.ones((r, n), dtype=bool)
    mask[np.repeat(np.arange(r), k), rows.ravel()] = False
    return np.nonzero(mask)[1].reshape(r, n - k)


@dataclass(frozen=True)
class SubsetIndexer:
    """Bijection between l-subsets of [n] and ``range(C(n, l))``."""

    n: int
    ell: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParameterError(f"n must be positive, got {self.n}")
        if not (0 <= self.ell <= self.n):
            raise ParameterError(f"need 0 <= l <= n, got n={self.n}, l={self.ell}")
        if self.n > MAX_N or binom(self.n, self.ell) > _INT64_MAX:
            raise CapacityError(
                f"C({self.n},{self.ell}) does not fit the 64-bit binomial table"
            )

    @property
    def size(self) -> int:
        return binom(self.n, self.ell)

    def _check(self, s: Sequence[int]) -> tuple[int, ...]:
        s = tuple(int(e) for e in s)
        if len(s) != self.ell:
            raise InvalidSubsetError(f"expected {self.ell} elements, got {len(s)}")
        if any(b <= a for a, b in zip(s, s[1:])):
            raise InvalidSubsetError(f"subset {s} is not strictly increasing")
        if s and (s[0] < 0 or s[-1] >= self.n):
            raise InvalidSubsetError(f"subset {s} has elements outside [0, {self.n})")
        return s

    def rank(self, s: Sequence[int]) -> int:
        s = self._check(s)
        return sum(binom(e, i + 1) for i, e in enumerate(s))

    def unrank(self, r: int) -> tuple[int, ...]:
        r = int(r)
        if not (0 <= r < self.size):
            raise IndexError(f"rank {r} out of range [0, {self.size})")
        out = []
        e = self.n - 1
        for i in range(self.ell, 0, -1):
            while binom(e, i) > r:
                e -= 1
            out.append(e)
            r -= binom(e, i)
            e -= 1
        return tuple(reversed(out))

    def all(self) -> np.ndarray:
        return all_subsets(self.n, self.ell)

    def neighbors(
        self, s: Sequence[int], p: int
    ) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Lazily yield ``(T, S ^ T)`` for every l-subset T with ``|S ^ T| = p``."""
        s = self._check(s)
        if p % 2:
            raise ParameterError(f"p must be even, got {p}")
        h = p // 2
        if not (0 <= h <= self.ell and h <= self.n - self.ell):
            raise ParameterError(
                f"need p/2 <= l <= n - p/2, got n={self.n}, l={self.ell}, p={p}"
            )
        members = set(s)
        outside = [e for e in range(self.n) if e not in members]
        for drop in combinations(s, h):
            kept = members.difference(drop)
            for add in combinations(outside, h):
                yield tuple(sorted(kept.union(add))), tuple(sorted(drop + add))


def neighbor_index_arrays(
    n: int, ell: int, n_drop: int, n_add: int
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(col_ranks, diff_ranks)`` per (drop, add) choice, vectorized over rows.

    Row r is the colex-r l-subset S. For each choice of ``n_drop`` positions of
    S to remove and ``n_add`` positions of its complement to insert, the
    resulting subset T (size ``l - n_drop + n_add``) and the symmetric
    difference ``S ^ T`` (size ``n_drop + n_add``) are ranked. Choices are
    visited in a fixed order so accumulations over them are deterministic.
    """
    if not (0 <= n_drop <= ell and 0 <= n_add <= n - ell):
        raise ParameterError(
            f"cannot drop {n_drop} and add {n_add} with n={n}, l={ell}"
        )
    rows = all_subsets(n, ell)
    comp = complements(rows, n)
    for drop in combinations(range(ell), n_drop):
        keep = [c for c in range(ell) if c not in drop]
        kept = rows[:, keep]
        dropped = rows[:, list(drop)]
        for add in combinations(range(n - ell), n_add):
            added = comp[:, list(add)]
            t = np.sort(np.concatenate([kept, added], axis=1), axis=1)
            e = np.sort(np.concatenate([dropped, added], axis=1), axis=1)
            yield rank_rows(t), rank_rows(e)
