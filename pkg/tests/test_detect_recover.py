import numpy as np
import pytest
from hypothesis import given, strategies as st

from kikuchi.combinat import all_subsets, binom, d_ell
from kikuchi.detect_recover import detect, recover, recover_even, recover_odd, voting_matrix
from kikuchi.errors import ParameterError
from kikuchi.kikuchi_matrix import build, conjugate_by_spike
from kikuchi.tensor_model import SubsetTensor, correlation, generate, spike_products, tensor_unfold

from oracles import naive_voting


def _u_x(x, n, ell):
    return np.prod(np.asarray(x)[all_subsets(n, ell)], axis=1).astype(np.int64)


def test_noiseless_detection():
    inst = generate(10, 4, 0.8, seed=2, noise_scale=0.0)
    rep = detect(inst.tensor, 3, 0.8)
    assert rep.lambda_max == pytest.approx(0.8 * d_ell(10, 3, 4), rel=1e-9)
    assert rep.verdict == "planted" and rep.threshold == pytest.approx(0.4 * d_ell(10, 3, 4))
    assert not rep.inconclusive


def test_detection_errors():
    t = generate(8, 4, 1.0).tensor
    with pytest.raises(ParameterError):
        detect(t, 2, 0.0)
    with pytest.raises(ParameterError):
        detect(generate(8, 3, 1.0).tensor, 2, 1.0)
    with pytest.raises(ParameterError):
        detect(t, 7, 1.0)


def test_voting_matches_naive_enumeration():
    gen = np.random.default_rng(0)
    for n, ell in [(6, 2), (7, 3), (6, 1)]:
        v = gen.standard_normal(binom(n, ell))
        got = voting_matrix(v, n, ell)
        assert np.allclose(got, naive_voting(list(v), n, ell))
        assert np.allclose(got, got.T) and not np.any(np.diag(got))
    assert not np.any(voting_matrix(np.zeros(15), 6, 2))
    with pytest.raises(ParameterError):
        voting_matrix(np.ones(3), 6, 2)


def test_voting_closed_form_on_spike_vectors():
    n, ell = 6, 2
    for bits in range(2**n):
        x = np.array([1 - 2 * ((bits >> i) & 1) for i in range(n)])
        v = voting_matrix(_u_x(x, n, ell), n, ell)
        assert v.dtype.kind == "i"
        want = binom(n - 2, ell - 1) * np.outer(x, x)
        np.fill_diagonal(want, 0)
        assert np.array_equal(v, want)


@given(st.integers(0, 10**6), st.sampled_from([(6, 2), (7, 3), (8, 2)]))
def test_voting_norm_inequalities(seed, shape):
    n, ell = shape
    gen = np.random.default_rng(seed)
    u = gen.standard_normal(binom(n, ell))
    e = gen.standard_normal(binom(n, ell)) * gen.uniform(0.01, 3)
    vu = voting_matrix(u, n, ell)
    assert np.sum(vu**2) <= ell**2 * (u @ u) ** 2 * (1 + 1e-12)
    diff = voting_matrix(u + e, n, ell) - vu
    assert np.sum(diff**2) <= 3 * ell**2 * (e @ e) * (2 * (u @ u) + e @ e) * (1 + 1e-12)


def test_noiseless_recovery_all_ones():
    inst = generate(8, 4, 1.0, seed=0, noise_scale=0.0)
    ones = SubsetTensor(8, 4, np.ones(binom(8, 4)))
    rep = recover_even(ones, 2, spike=np.ones(8))
    assert rep.corr == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(rep.x_hat, np.ones(8) / np.sqrt(8))
    rep = recover(inst.tensor, 3, spike=inst.spike)
    assert rep.corr == pytest.approx(1.0, abs=1e-10)
    assert np.linalg.norm(rep.x_hat) == pytest.approx(1.0, abs=1e-12)


def test_recovery_sign_blind():
    inst = generate(12, 4, 3.0, seed=4)
    a = recover(inst.tensor, 2, spike=inst.spike)
    b = recover(inst.tensor, 2, spike=-inst.spike)
    assert a.corr == b.corr and a.corr > 0.9
    assert np.abs(a.x_hat).max() == a.x_hat.max()


def test_odd_noiseless_and_zero():
    inst = generate(8, 3, 1.0, seed=1, noise_scale=0.0)
    for ell in (1, 2, 3):
        assert recover_odd(inst.tensor, ell, spike=inst.spike).corr == pytest.approx(1.0, abs=1e-9)
    zero = SubsetTensor(8, 3, np.zeros(binom(8, 3)))
    rep = recover_odd(zero, 1, spike=inst.spike)
    assert rep.corr == 0.0 and not np.any(rep.x_hat)


def test_odd_level_one_agrees_with_unfolding():
    n = 12
    for seed in range(3):
        inst = generate(n, 3, 3 * n ** -0.5 * 4, seed=seed, dense=True)
        a = recover_odd(inst.tensor, 1).x_hat
        b = tensor_unfold(inst.dense)
        assert correlation(a, b) >= 0.99


def test_gauge_equivariance():
    inst = generate(6, 4, 0.3, seed=5)
    x = inst.spike
    m = build(inst.tensor, 2, "explicit")
    g = conjugate_by_spike(m, x)
    vals, vecs = np.linalg.eigh(m.to_dense())
    gvals, gvecs = np.linalg.eigh(g.to_dense())
    assert np.allclose(vals, gvals, atol=1e-10)
    d = _u_x(x, 6, 2)
    assert abs(abs((d * vecs[:, -1]) @ gvecs[:, -1]) - 1) < 1e-8


def test_top_eigenvalue_monotone_in_snr_for_fixed_noise():
    lams = np.linspace(0, 2, 9)
    for seed in range(3):
        tops = [detect(generate(12, 4, lam, seed=seed).tensor, 2, 1.0).lambda_max for lam in lams]
        assert all(b >= a - 1e-8 for a, b in zip(tops, tops[1:]))
