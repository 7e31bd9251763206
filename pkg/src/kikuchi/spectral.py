"""Leading eigenpairs and singular pairs of matvec-only operators.

Two solvers sit behind one contract. ``method="lanczos"`` (the default) runs
restarted Lanczos with full reorthogonalization and restarts from the current
best Ritz vector. ``method="power"`` is plain power iteration, with the shift
``A + s I`` (``s`` a spectral-radius estimate) when the largest eigenvalue by
value is wanted. Either way the returned pair satisfies

    ||A v - theta v|| <= tol * max(|theta|, sigma_hat)

whenever ``converged`` is true. Here ``sigma_hat`` is the solver's
spectral-radius estimate. On hitting the iteration cap the best iterate is
returned with ``converged=False``; callers decide what to do with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import rng
from .errors import ParameterError

WANTS = ("value", "magnitude")
METHODS = ("lanczos", "power")


@dataclass(frozen=True)
class EigOptions:
    tol: float = 1e-8
    max_iters: int | None = None
    seed: int = 0
    want: str = "value"
    method: str = "lanczos"
    krylov_dim: int = 48

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ParameterError(f"tol must be positive, got {self.tol}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ParameterError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.want not in WANTS:
            raise ParameterError(f"want must be one of {WANTS}, got {self.want!r}")
        if self.method not in METHODS:
            raise ParameterError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.krylov_dim < 2:
            raise ParameterError("krylov_dim must be at least 2")

    def iteration_cap(self, dim: int) -> int:
        if self.max_iters is not None:
            return self.max_iters
        return max(10_000, int(100 * math.log(max(dim, 2))))


@dataclass(frozen=True, eq=False)
class EigResult:
    value: float
    vector: np.ndarray
    residual: float
    converged: bool
    matvecs: int
    radius_estimate: float


@dataclass(frozen=True, eq=False)
class SingularResult:
    sigma: float
    left: np.ndarray
    right: np.ndarray
    residual: float
    converged: bool
    matvecs: int


def canonical_sign(v: np.ndarray) -> np.ndarray:
    """Flip ``v`` so its largest-magnitude coordinate is positive."""
    v = np.asarray(v, dtype=float)
    if v.size and v[np.argmax(np.abs(v))] < 0:
        return -v
    return v


def as_matvec(op, dim: int | None = None) -> tuple[Callable[[np.ndarray], np.ndarray], int]:
    """Normalize an array, sparse matrix, operator object or callable to ``(matvec, dim)``."""
    if hasattr(op, "matvec") and hasattr(op, "shape"):
        rows, cols = op.shape
        if rows != cols:
            raise ParameterError(f"operator must be square, got shape {op.shape}")
        return op.matvec, rows
    if hasattr(op, "shape") and hasattr(op, "__matmul__"):
        rows, cols = op.shape
        if rows != cols:
            raise ParameterError(f"operator must be square, got shape {op.shape}")
        return (lambda v: np.asarray(op @ v).ravel()), rows
    if callable(op):
        if dim is None:
            raise ParameterError("dim is required when the operator is a bare callable")
        return op, dim
    raise ParameterError(f"cannot use {type(op).__name__} as an operator")


def _start_vector(dim: int, seed: int, attempt: int) -> np.ndarray:
    v = rng.standard_normal(rng.stream(seed, "eig-start", attempt), dim)
    return v / np.linalg.norm(v)


def _pick(values: np.ndarray, want: str) -> int:
    if want == "value":
        return int(np.argmax(values))
    return int(np.argmax(np.abs(values)))


def _lanczos(matvec, q0: np.ndarray, k: int):
    dim = q0.shape[0]
    basis = np.zeros((dim, k))
    alphas: list[float] = []
    betas: list[float] = []
    q = q0
    scale = 0.0
    for j in range(k):
        basis[:, j] = q
        w = np.asarray(matvec(q), dtype=float)
        a = float(q @ w)
        alphas.append(a)
        block = basis[:, : j + 1]
        for _ in range(2):
            w = w - block @ (block.T @ w)
        b = float(np.linalg.norm(w))
        scale = max(scale, abs(a), b)
        if j == k - 1 or b <= 1e-12 * max(scale, 1e-300):
            break
        betas.append(b)
        q = w / b
    m = len(alphas)
    tri = np.diag(alphas) + np.diag(betas[: m - 1], 1) + np.diag(betas[: m - 1], -1)
    return basis[:, :m], tri, m


def _lanczos_solve(matvec, dim: int, opts: EigOptions) -> EigResult:
    cap = opts.iteration_cap(dim)
    k = min(opts.krylov_dim, dim)
    v = _start_vector(dim, opts.seed, 0)
    used = 0
    radius = 0.0
    best: EigResult | None = None
    stalled = 0
    while True:
        k_run = max(1, min(k, cap - used - 1))
        basis, tri, m = _lanczos(matvec, v, k_run)
        used += m
        thetas, ys = np.linalg.eigh(tri)
        radius = max(radius, float(np.max(np.abs(thetas))))
        i = _pick(thetas, opts.want)
        x = basis @ ys[:, i]
        x /= np.linalg.norm(x)
        ax = np.asarray(matvec(x), dtype=float)
        used += 1
        theta = float(x @ ax)
        res = float(np.linalg.norm(ax - theta * x))
        converged = res <= opts.tol * max(abs(theta), radius)
        if best is None or res < best.residual:
            stalled = 0 if best is None or res < 0.5 * best.residual else stalled + 1
            best = EigResult(theta, x, res, converged, used, radius)
        else:
            stalled += 1
        if converged or used >= cap:
            return EigResult(best.value, best.vector, best.residual, best.converged, used, radius)
        if stalled >= 3 and k < dim:
            k = min(dim, 2 * k)
            stalled = 0
        v = best.vector


def _power_solve(matvec, dim: int, opts: EigOptions) -> EigResult:
    cap = opts.iteration_cap(dim)
    used = 0
    v = _start_vector(dim, opts.seed, 0)
    # spectral-radius estimate from plain power steps
    radius = 0.0
    w = v
    for _ in range(min(50, cap // 2)):
        aw = np.asarray(matvec(w), dtype=float)
        used += 1
        norm = float(np.linalg.norm(aw))
        radius = max(radius, norm)
        if norm == 0:
            break
        w = aw / norm
    shift = radius if opts.want == "value" else 0.0

    best: EigResult | None = None
    last_res = math.inf
    same = 0
    restarted = False
    while best is None or used < cap:
        av = np.asarray(matvec(v), dtype=float)
        used += 1
        theta = float(v @ av)
        res = float(np.linalg.norm(av - theta * v))
        radius = max(radius, abs(theta))
        converged = res <= opts.tol * max(abs(theta), radius)
        if best is None or res < best.residual:
            best = EigResult(theta, v, res, converged, used, radius)
        if converged:
            break
        same = same + 1 if abs(res - last_res) <= 1e-14 * max(1.0, res) else 0
        last_res = res
        if same >= 50 and not restarted:
            v = _start_vector(dim, opts.seed, 1)
            restarted, same = True, 0
            continue
        nxt = av + shift * v
        norm = float(np.linalg.norm(nxt))
        if norm == 0:
            break
        v = nxt / norm
    assert best is not None
    return EigResult(best.value, best.vector, best.residual, best.converged, used, radius)


def leading_eig(op, opts: EigOptions | None = None, dim: int | None = None) -> EigResult:
    """Leading eigenpair of a symmetric operator (by value or by magnitude)."""
    opts = opts or EigOptions()
    matvec, dim = as_matvec(op, dim)
    if dim < 1:
        raise ParameterError("operator dimension must be positive")
    if opts.method == "power":
        return _power_solve(matvec, dim, opts)
    return _lanczos_solve(matvec, dim, opts)


def leading_singular(op, opts: EigOptions | None = None) -> SingularResult:
    """Top singular triple: ``left`` leads ``op op^T``, ``right = op^T left`` (unnormalized).

    ``op`` must expose ``shape``, ``matvec`` and ``rmatvec`` (or be a matrix).
    The zero operator yields ``sigma = 0`` with ``left`` the normalized start
    vector and ``right = 0``.
    """
    opts = opts or EigOptions()
    if hasattr(op, "rmatvec"):
        mv, rmv = op.matvec, op.rmatvec
    elif hasattr(op, "__matmul__") and hasattr(op, "T"):
        mv = lambda v: np.asarray(op @ v).ravel()  # noqa: E731
        rmv = lambda u: np.asarray(op.T @ u).ravel()  # noqa: E731
    else:
        raise ParameterError("leading_singular needs matvec and rmatvec")
    rows = op.shape[0]
    gram_opts = EigOptions(
        tol=opts.tol,
        max_iters=opts.max_iters,
        seed=opts.seed,
        want="value",
        method=opts.method,
        krylov_dim=opts.krylov_dim,
    )
    res = leading_eig(lambda u: mv(rmv(u)), gram_opts, dim=rows)
    right = np.asarray(rmv(res.vector), dtype=float)
    return SingularResult(
        float(np.linalg.norm(right)),
        res.vector,
        right,
        res.residual,
        res.converged,
        res.matvecs,
    )
