import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from modcoherence.closed_forms import pure_mod_trace
from modcoherence.states import (SQRT_HALF, block_direct_sum, canonicalize, complex_gaussians,
                                 haar_pure, is_incoherent, maximally_coherent, random_density,
                                 substream)
from modcoherence.validation import ValidationError, check_density_matrix


def test_haar_pure_dim_one():
    for seed in range(5):
        x = haar_pure(1, substream(seed, 0))
        assert abs(abs(x[0]) - 1) < 1e-15


def test_haar_pure_rejects_zero_dim():
    with pytest.raises(ValidationError):
        haar_pure(0, substream(0))


def test_haar_pure_deterministic_per_seed():
    np.testing.assert_array_equal(haar_pure(5, substream(3, 1)), haar_pure(5, substream(3, 1)))
    assert not np.array_equal(haar_pure(5, substream(3, 1)), haar_pure(5, substream(3, 2)))


def test_box_muller_moments():
    z = complex_gaussians(substream(1), 200_000)
    assert abs(z.real.mean()) < 0.01 and abs(z.imag.mean()) < 0.01
    assert abs(z.real.var() - 1) < 0.01 and abs(z.imag.var() - 1) < 0.01
    assert abs(np.mean(z.real * z.imag)) < 0.01


def test_haar_mean_first_entry():
    # by symmetry E|x_j|^2 = 1/n
    rng = substream(7)
    vals = [abs(haar_pure(4, rng)[0]) ** 2 for _ in range(100_000)]
    assert abs(np.mean(vals) - 0.25) < 0.005


def test_qubits_always_reach_threshold():
    rng = substream(8)
    for _ in range(100_000 // 10):
        assert np.abs(haar_pure(2, rng)).max() >= SQRT_HALF


def test_haar_unitary_invariance_ks():
    rng = substream(9)
    n = 5
    u = haar_pure(n, substream(99))
    a, b = [], []
    for _ in range(10_000):
        x = haar_pure(n, rng)
        a.append(abs(np.vdot(u, x)) ** 2)
        b.append(abs(x[0]) ** 2)
    assert stats.ks_2samp(a, b).pvalue > 0.01


def test_random_density_rank_one_matches_haar():
    for i in range(20):
        x = haar_pure(6, substream(4, i))
        rho = random_density(6, 1, substream(4, i))
        np.testing.assert_allclose(rho, np.outer(x, x.conj()), atol=1e-14)


@pytest.mark.parametrize("n,k", [(2, 2), (5, 3), (8, 1), (6, 6)])
def test_random_density_is_state(n, k):
    for i in range(50):
        rho = check_density_matrix(random_density(n, k, substream(5, i)))
        assert abs(np.trace(rho).real - 1) < 1e-14


def test_random_density_rank_exact():
    for n, k in [(6, 2), (10, 3), (12, 12)]:
        good = sum(int(np.sum(np.linalg.eigvalsh(random_density(n, k, substream(6, i))) > 1e-9) == k)
                   for i in range(1000))
        assert good >= 999


@pytest.mark.parametrize("k", [0, 4])
def test_random_density_bad_rank(k):
    with pytest.raises(ValidationError):
        random_density(3, k, substream(0))


def test_canonicalize_examples():
    np.testing.assert_allclose(canonicalize(np.array([1j, -1]) / np.sqrt(2)), [SQRT_HALF, SQRT_HALF])
    np.testing.assert_allclose(canonicalize([0, 1]), [1, 0])
    x = np.array([np.sqrt(0.2), np.sqrt(0.8) * np.exp(1j * np.pi / 3)])
    np.testing.assert_allclose(canonicalize(x), np.sqrt([0.8, 0.2]), atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**31))
def test_canonicalize_idempotent_and_invariant(n, seed):
    rng = np.random.default_rng(seed)
    x = haar_pure(n, rng)
    c = canonicalize(x)
    np.testing.assert_array_equal(canonicalize(c), c)
    assert abs(np.linalg.norm(c) - 1) < 1e-12
    assert abs(pure_mod_trace(c) - pure_mod_trace(x)) < 1e-15
    assert c[0] == np.abs(x).max()


def test_is_incoherent_examples(plus_dm, rng):
    assert is_incoherent(np.diag([0.3, 0.7]), 1e-10)
    assert not is_incoherent(plus_dm, 1e-10)
    noisy = np.diag(rng.dirichlet(np.ones(4))) + 1e-12 * (np.ones((4, 4)) - np.eye(4))
    assert is_incoherent(noisy, 1e-10)


def test_block_direct_sum_examples(plus_dm):
    out = block_direct_sum(1.0, plus_dm, 0.0, [[1.0]])
    np.testing.assert_allclose(out[:2, :2], plus_dm)
    assert out[2, 2] == 0
    np.testing.assert_allclose(block_direct_sum(0.4, [[1.0]], 0.6, [[1.0]]), np.diag([0.4, 0.6]))
    full = block_direct_sum(0.5, plus_dm, 0.5, plus_dm)
    check_density_matrix(full)
    assert full.shape == (4, 4)


def test_block_direct_sum_probability_violation(plus_dm):
    with pytest.raises(ValidationError):
        block_direct_sum(0.5, plus_dm, 0.6, plus_dm)


def test_block_direct_sum_preserves_invariants():
    for i in range(30):
        rng = substream(11, i)
        r1 = random_density(3, 2, rng)
        r2 = random_density(2, 1, rng)
        check_density_matrix(block_direct_sum(0.3, r1, 0.7, r2))


def test_maximally_coherent_is_pure():
    rho = maximally_coherent(3)
    np.testing.assert_allclose(np.linalg.eigvalsh(rho), [0, 0, 1], atol=1e-15)
