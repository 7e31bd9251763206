import numpy as np
import pytest
from hypothesis import given, strategies as st

from kikuchi.errors import ParameterError
from kikuchi.johnson import adjacency
from kikuchi.spectral import EigOptions, canonical_sign, leading_eig, leading_singular

from oracles import jacobi_singular_values

METHODS = ("lanczos", "power")


@pytest.mark.parametrize("method", METHODS)
def test_diagonal_examples(method):
    d = np.diag([3.0, 1.0, -5.0])
    res = leading_eig(d, EigOptions(method=method))
    assert res.converged and res.value == pytest.approx(3.0, abs=1e-7)
    res = leading_eig(d, EigOptions(method=method, want="magnitude"))
    assert res.value == pytest.approx(-5.0, abs=1e-7)


@pytest.mark.parametrize("method", METHODS)
def test_johnson_top_pair(method):
    x = adjacency(6, 2, 4)
    res = leading_eig(x, EigOptions(method=method))
    assert res.value == pytest.approx(6.0, abs=1e-7)
    v = res.vector / np.linalg.norm(res.vector)
    assert abs(abs(v.sum()) / np.sqrt(v.size) - 1) < 1e-6


@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=2, max_size=30),
       st.integers(0, 1000))
def test_shift_correctness_on_diagonals(diag, seed):
    d = np.array(diag)
    top = np.sort(d)[-1]
    gap = top - np.sort(d)[-2]
    res = leading_eig(np.diag(d), EigOptions(seed=seed))
    assert res.converged
    # a repeated top eigenvalue only fixes the eigenspace
    assert res.value == pytest.approx(top, abs=1e-6 * max(1.0, np.abs(d).max()))
    if gap > 1e-3:
        assert abs(res.vector[np.argmax(d)]) == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize("method", METHODS)
def test_residual_contract_and_determinism(method):
    gen = np.random.default_rng(3)
    a = gen.standard_normal((60, 60))
    a = a + a.T
    opts = EigOptions(method=method, seed=9, tol=1e-9)
    r1 = leading_eig(a, opts)
    r2 = leading_eig(a, opts)
    assert np.array_equal(r1.vector, r2.vector) and r1.value == r2.value
    if r1.converged:
        resid = np.linalg.norm(a @ r1.vector - r1.value * r1.vector)
        assert resid <= opts.tol * max(abs(r1.value), r1.radius_estimate) * (1 + 1e-6)
    assert r1.value == pytest.approx(np.linalg.eigvalsh(a)[-1], rel=1e-6)


def test_cap_returns_best_iterate_flagged():
    gen = np.random.default_rng(0)
    a = gen.standard_normal((200, 200))
    a = a + a.T
    res = leading_eig(a, EigOptions(method="power", max_iters=5, tol=1e-14))
    assert not res.converged and res.matvecs <= 60


def test_options_validation():
    with pytest.raises(ParameterError):
        EigOptions(tol=0)
    with pytest.raises(ParameterError):
        EigOptions(max_iters=0)
    with pytest.raises(ParameterError):
        EigOptions(want="smallest")
    with pytest.raises(ParameterError):
        leading_eig(np.ones((2, 3)))
    with pytest.raises(ParameterError):
        leading_eig(lambda v: v)


def test_singular_rank_one():
    a = np.array([1.0, 2.0, -1.0])
    b = np.array([0.5, 0.0, 1.0, 3.0])
    res = leading_singular(np.outer(a, b))
    assert res.sigma == pytest.approx(np.linalg.norm(a) * np.linalg.norm(b), rel=1e-10)
    assert abs(res.left @ a) / np.linalg.norm(a) == pytest.approx(1.0, abs=1e-10)
    assert abs(res.right @ b) / (np.linalg.norm(b) * res.sigma) == pytest.approx(1.0, abs=1e-10)


def test_singular_zero_operator():
    res = leading_singular(np.zeros((4, 6)))
    assert res.sigma == 0.0
    assert not np.any(res.right)


def test_singular_against_jacobi_svd():
    gen = np.random.default_rng(5)
    for _ in range(3):
        a = gen.standard_normal((20, 35))
        res = leading_singular(a, EigOptions(tol=1e-12))
        assert res.sigma == pytest.approx(jacobi_singular_values(a)[0], abs=1e-8)


def test_canonical_sign():
    assert np.array_equal(canonical_sign(np.array([0.1, -0.9])), np.array([-0.1, 0.9]))
    assert np.array_equal(canonical_sign(np.array([0.1, 0.9])), np.array([0.1, 0.9]))
