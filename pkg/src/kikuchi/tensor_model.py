"""Spiked tensor instances, spike priors, correlation and dense-tensor baselines.

The observation is ``Y = lam * x^{(x)p} + G`` with a symmetric Gaussian noise
tensor G. The spectral algorithms only read the entries with distinct indices,
kept as a :class:`SubsetTensor` (one value per p-subset, in colex order). The
full symmetric array is only built on request, for the power-method and
unfolding baselines and for boosting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from . import rng
from .combinat import all_subsets, binom, rank_rows
from .errors import (
    CapabilityError,
    CapacityError,
    ParameterError,
    UndefinedCorrelationError,
)
from .spectral import canonical_sign

DENSE_CAP_BYTES = 2 * 1024**3


@dataclass(frozen=True, eq=False)
class SubsetTensor:
    """Entries ``Y_E`` for every p-subset E of [n], indexed by colex rank."""

    n: int
    p: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.shape != (binom(self.n, self.p),):
            raise ParameterError(
                f"expected {binom(self.n, self.p)} entries for n={self.n}, p={self.p}, "
                f"got shape {entries.shape}"
            )
        if not np.all(np.isfinite(entries)):
            raise ParameterError("tensor entries must be finite")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def value(self, subset) -> float:
        s = np.asarray(sorted(subset), dtype=np.int64).reshape(1, -1)
        if s.shape[1] != self.p:
            raise ParameterError(f"expected a {self.p}-subset, got {tuple(subset)}")
        return float(self.entries[rank_rows(s)[0]])

    def scaled(self, weights: np.ndarray) -> "SubsetTensor":
        return SubsetTensor(self.n, self.p, self.entries * weights)


@dataclass(frozen=True, eq=False)
class DenseSymmetricTensor:
    """Full ``n^p`` array; symmetric for spiked instances, arbitrary for certification."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim < 1 or len(set(values.shape)) != 1:
            raise ParameterError(f"expected an n x ... x n array, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.ndim

    def distinct_entries(self) -> SubsetTensor:
        subsets = all_subsets(self.n, self.p)
        return SubsetTensor(self.n, self.p, self.values[tuple(subsets.T)])


@dataclass(frozen=True)
class SpikePrior:
    """Spike distribution, normalized so ``||x|| = sqrt(n)`` (in expectation for ``iid``)."""

    kind: str = "rademacher"
    support: tuple[float, ...] = ()
    probs: tuple[float, ...] = ()

    KINDS = ("rademacher", "sphere", "iid")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ParameterError(f"unknown prior kind {self.kind!r}")
        if self.kind == "iid":
            if len(self.support) == 0 or len(self.support) != len(self.probs):
                raise ParameterError("iid prior needs matching support and probs")
            probs = np.asarray(self.probs, dtype=float)
            if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
                raise ParameterError("iid prior probabilities must be a distribution")
            second = float(np.dot(probs, np.square(self.support)))
            if abs(second - 1.0) > 1e-12:
                raise ParameterError(f"iid prior needs E[pi^2] = 1, got {second!r}")

    @classmethod
    def rademacher(cls) -> "SpikePrior":
        return cls("rademacher")

    @classmethod
    def sphere(cls) -> "SpikePrior":
        return cls("sphere")

    @classmethod
    def iid(cls, support, probs) -> "SpikePrior":
        """I.i.d. entries from a finite distribution, rescaled to unit second moment."""
        support = np.asarray(support, dtype=float)
        probs = np.asarray(probs, dtype=float)
        probs = probs / probs.sum()
        scale = math.sqrt(float(np.dot(probs, support**2)))
        if scale == 0:
            raise ParameterError("iid prior support must not be all zeros")
        return cls("iid", tuple((support / scale).tolist()), tuple(probs.tolist()))

    @property
    def tag(self) -> int:
        return self.KINDS.index(self.kind)

    def sample(self, n: int, gen: np.random.Generator) -> np.ndarray:
        if self.kind == "rademacher":
            return rng.signs(gen, n)
        if self.kind == "sphere":
            z = rng.standard_normal(gen, n)
            return z * (math.sqrt(n) / np.linalg.norm(z))
        idx = np.searchsorted(np.cumsum(self.probs), gen.random(n), side="right")
        return np.asarray(self.support)[np.minimum(idx, len(self.support) - 1)]


@dataclass(frozen=True, eq=False)
class Instance:
    spike: np.ndarray
    tensor: SubsetTensor
    lam: float
    seed: int
    prior: SpikePrior = field(default_factory=SpikePrior)
    dense: DenseSymmetricTensor | None = None

    @property
    def n(self) -> int:
        return self.tensor.n

    @property
    def p(self) -> int:
        return self.tensor.p


def spike_products(x: np.ndarray, p: int) -> np.ndarray:
    """``x^E = prod_{i in E} x_i`` for every p-subset E, in colex order."""
    x = np.asarray(x, dtype=float)
    return np.prod(x[all_subsets(len(x), p)], axis=1)


def rank_one(x: np.ndarray, p: int) -> np.ndarray:
    out = np.asarray(x, dtype=float)
    for _ in range(p - 1):
        out = np.multiply.outer(out, x)
    return out


def symmetrize(a: np.ndarray) -> np.ndarray:
    """``(1/sqrt(p!)) * sum over axis permutations``, so distinct-index entries stay unit variance."""
    p = a.ndim
    out = np.zeros_like(a)
    for perm in permutations(range(p)):
        out += np.transpose(a, perm)
    # copy each sorted-index value to all its permutations so symmetry is exact
    canonical = np.sort(np.indices(a.shape).reshape(p, -1), axis=0)
    out = out[tuple(canonical)].reshape(a.shape)
    return out / math.sqrt(math.factorial(p))


def generate(
    n: int,
    p: int,
    lam: float,
    prior: SpikePrior | None = None,
    seed: int = 0,
    dense: bool = False,
    noise_scale: float = 1.0,
    dense_cap_bytes: int = DENSE_CAP_BYTES,
) -> Instance:
    """Draw a spiked instance. The noise stream does not depend on ``lam``.

    Reusing ``seed`` with a different ``lam`` therefore keeps the same noise
    realization, and ``noise_scale=0`` gives the noiseless tensor.
    """
    if p < 2 or n < p:
        raise ParameterError(f"need n >= p >= 2, got n={n}, p={p}")
    if lam < 0:
        raise ParameterError(f"lam must be non-negative, got {lam}")
    prior = prior or SpikePrior.rademacher()
    spike = prior.sample(n, rng.stream(seed, "spike"))
    if dense:
        if 8 * n**p > dense_cap_bytes:
            raise CapacityError(f"dense tensor with n={n}, p={p} exceeds {dense_cap_bytes} bytes")
        g = rng.standard_normal(rng.stream(seed, "dense-noise"), n**p).reshape((n,) * p)
        values = lam * rank_one(spike, p) + noise_scale * symmetrize(g)
        full = DenseSymmetricTensor(values)
        return Instance(spike, full.distinct_entries(), lam, seed, prior, full)
    g = rng.standard_normal(rng.stream(seed, "noise"), binom(n, p))
    entries = lam * spike_products(spike, p) + noise_scale * g
    return Instance(spike, SubsetTensor(n, p, entries), lam, seed, prior)


def correlation(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a, b>| / (||a|| ||b||)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise UndefinedCorrelationError("correlation is undefined for a zero vector")
    return float(min(1.0, abs(np.dot(a, b)) / (na * nb)))


def contract(dense: DenseSymmetricTensor, u: np.ndarray) -> np.ndarray:
    """``Y{u}_i = sum Y_{i, j1..j_{p-1}} u_j1 ... u_j_{p-1}``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (dense.n,):
        raise ParameterError(f"expected a vector of length {dense.n}, got shape {u.shape}")
    out = dense.values
    for _ in range(dense.p - 1):
        out = out @ u
    return out


def boost(instance: Instance, u: np.ndarray) -> np.ndarray:
    """One tensor power step ``x_hat = Y{u}`` from an initial guess ``u``."""
    if instance.dense is None:
        raise CapabilityError("boosting needs an instance generated with dense=True")
    if not np.any(u):
        raise ParameterError("initial guess must be nonzero")
    return contract(instance.dense, u)


def tensor_power_method(dense: DenseSymmetricTensor, u0: np.ndarray, iters: int) -> np.ndarray:
    u = np.asarray(u0, dtype=float)
    u = u / np.linalg.norm(u)
    for _ in range(iters):
        nxt = contract(dense, u)
        norm = np.linalg.norm(nxt)
        if norm == 0:
            break
        u = nxt / norm
    return u


def tensor_unfold(dense: DenseSymmetricTensor) -> np.ndarray:
    """Leading eigenvector of ``M M^T`` for the ``n x n^2`` flattening of an order-3 tensor."""
    if dense.p != 3:
        raise ParameterError(f"tensor unfolding is defined for p=3, got p={dense.p}")
    m = dense.values.reshape(dense.n, dense.n * dense.n)
    _, vecs = np.linalg.eigh(m @ m.T)
    return canonical_sign(vecs[:, -1])
