import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from kikuchi.errors import CapacityError, ParameterError
from kikuchi.odd_certifier import (
    brute_force_rademacher_norm,
    build_lifted_operator,
    certify_rademacher_norm,
    lift_identity_sides,
    lifted_tensor,
    n_bar,
    pair_counts,
    rademacher_form,
    random_sign_tensor,
)
from kikuchi.tensor_model import rank_one


def _naive_t_tilde(y):
    n = y.shape[0]
    t = np.zeros((n,) * 4)
    for a, b, c, d in itertools.product(range(n), repeat=4):
        if (a, c) != (b, d):
            t[a, b, c, d] = sum(y[a, c, e] * y[b, d, e] for e in range(n))
    return t


def _naive_related_pairs(n, q, ell, ab, cd):
    """Enumerate every (S, T) in [n]^l x [n]^l and test the relation directly."""
    values = set(ab) | set(cd)
    pairs = set()
    for s in itertools.product(range(n), repeat=ell):
        for positions in itertools.permutations(range(ell), 2 * q):
            others = [i for i in range(ell) if i not in positions]
            if any(s[i] in values for i in others):
                continue
            for left, right in ((ab, cd), (cd, ab)):
                if all(s[i] == left[j] for j, i in enumerate(positions)):
                    t = list(s)
                    for j, i in enumerate(positions):
                        t[i] = right[j]
                    pairs.add((s, tuple(t)))
    return pairs


def test_t_tilde_against_loops():
    y = random_sign_tensor(4, 3, seed=1)
    assert np.array_equal(lifted_tensor(y), _naive_t_tilde(y))


def test_pair_counts_against_direct_enumeration():
    n, q, ell = 5, 1, 3
    gen = np.random.default_rng(0)
    for _ in range(12):
        abcd = tuple(int(v) for v in gen.integers(0, n, size=4))
        got = pair_counts(n, 3, ell, [abcd])[0]
        want = len(_naive_related_pairs(n, q, ell, abcd[:2], abcd[2:]))
        assert got == want
        assert got >= n_bar(n, 3, ell)


def test_lift_identity_exact_in_rationals():
    n, ell = 4, 2
    y = random_sign_tensor(n, 3, seed=2)
    op = build_lifted_operator(y, ell)
    t = lifted_tensor(y)
    # rebuild M with Fraction weights from the stored counts
    keys = op.keys
    counts = dict(zip(keys.tolist(), op.counts.tolist()))
    flat = t.ravel()
    for bits in itertools.product((1, -1), repeat=n):
        lhs = Fraction(0)
        for key, cnt in counts.items():
            a, b, c, d = np.unravel_index(key, t.shape)
            pairs = _naive_related_pairs(n, 1, ell, (a, b), (c, d))
            assert len(pairs) == cnt
            w = Fraction(int(flat[key]), cnt)
            lhs += sum(w * math.prod(bits[i] for i in s) * math.prod(bits[i] for i in tt) for s, tt in pairs)
        rhs = sum(Fraction(int(flat[k])) * math.prod(bits[i] for i in np.unravel_index(k, t.shape))
                  for k in keys.tolist())
        # both sides for x = bits / sqrt(n): n^l * lhs / n^l and n^2q * rhs / n^2q
        assert lhs == rhs
        if bits[0] == 1 and bits[1] == -1:
            break


def test_lift_identity_floating_point():
    y = random_sign_tensor(6, 3, seed=4)
    op = build_lifted_operator(y, 2)
    for bits in itertools.product((1, -1), repeat=6):
        lhs, rhs = lift_identity_sides(op, y, np.array(bits) / math.sqrt(6))
        assert lhs == pytest.approx(rhs, abs=1e-9)


def test_operator_symmetric():
    op = build_lifted_operator(random_sign_tensor(5, 3, seed=3), 3)
    diff = op.matrix - op.matrix.T
    assert diff.nnz == 0 or abs(diff).max() == 0


def test_brute_force_examples():
    x0 = np.array([1, -1, 1, 1, -1, 1.0])
    for p in (3, 5):
        y = rank_one(x0, p)
        assert brute_force_rademacher_norm(y) == pytest.approx(6 ** (p / 2), rel=1e-12)
    assert brute_force_rademacher_norm(np.zeros((5, 5, 5))) == 0
    y = random_sign_tensor(6, 3, seed=0)
    x = np.array([1, 1, -1, 1, -1, -1.0])
    assert rademacher_form(y, -x) == -rademacher_form(y, x)
    best = max(abs(rademacher_form(y, np.array(b, float))) for b in itertools.product((1, -1), repeat=6))
    assert brute_force_rademacher_norm(y) == pytest.approx(best / 6**1.5)


def test_soundness():
    for seed in range(20):
        y = random_sign_tensor(6, 3, seed=seed)
        for ell in (2, 3):
            assert certify_rademacher_norm(y, ell).bound >= brute_force_rademacher_norm(y)


def test_errors():
    with pytest.raises(ParameterError):
        certify_rademacher_norm(np.ones((4, 4)), 2)
    with pytest.raises(ParameterError):
        certify_rademacher_norm(np.ones((4, 4, 4)), 1)
    with pytest.raises(CapacityError):
        certify_rademacher_norm(np.ones((12, 12, 12)), 6)
    with pytest.raises(CapacityError):
        brute_force_rademacher_norm(np.ones((25, 25, 25)))


def test_brute_force_median_regression():
    # frozen from the exhaustive oracle over seeds 0..19 at n = 8, p = 3
    values = [brute_force_rademacher_norm(random_sign_tensor(8, 3, seed=s)) for s in range(20)]
    assert float(np.median(values)) == pytest.approx(MEDIAN_N8_P3, rel=1e-12)
    assert float(np.median(values)) <= 2 * math.sqrt(8)


# median of max |<Y, x^3>| over sign vectors is 68, scaled by 8^(3/2)
MEDIAN_N8_P3 = 68 / 8**1.5
