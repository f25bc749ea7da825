"""Random states, canonical forms and block direct sums.

Every sampler takes an explicit ``numpy.random.Generator``; there is no
global random state.  :func:`substream` derives the independent generator
used for one Monte Carlo sample from ``(seed, *key)``.
"""

import numpy as np

from .validation import (ValidationError, check_density_matrix, check_probability,
                         check_pure_state)

SQRT_HALF = float(np.sqrt(0.5))


def substream(seed, *key):
    """Independent PCG64 generator for the sample identified by ``key``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def complex_gaussians(rng, shape):
    """Complex array whose real and imaginary parts are independent N(0, 1).

    Uses the Box-Muller transform on the generator's uniform stream so that
    one uniform pair yields one complex entry.
    """
    shape = tuple(np.atleast_1d(shape))
    m = int(np.prod(shape))
    u1 = rng.random(m)
    u2 = rng.random(m)
    r = np.sqrt(-2.0 * np.log1p(-u1))
    z = r * np.cos(2 * np.pi * u2) + 1j * (r * np.sin(2 * np.pi * u2))
    return z.reshape(shape)


def _check_dim(n):
    if int(n) != n or n < 1:
        raise ValidationError(f"dimension must be a positive integer, got {n!r}")
    return int(n)


def haar_pure(n, rng):
    """Haar-random unit vector in C^n (normalized complex Gaussian vector)."""
    n = _check_dim(n)
    z = complex_gaussians(rng, n)
    return z / np.linalg.norm(z)


def random_density(n, k, rng):
    """Rank-``k`` density matrix ``G G^dagger / tr(G G^dagger)`` with ``G`` complex Ginibre n x k.

    For ``k = 1`` this consumes the stream exactly as :func:`haar_pure` does
    and returns the projector onto that vector.
    """
    n = _check_dim(n)
    if int(k) != k or not 1 <= k <= n:
        raise ValidationError(f"rank must satisfy 1 <= k <= n = {n}, got {k!r}")
    k = int(k)
    # column-major fill so that column 0 matches haar_pure's draw
    G = complex_gaussians(rng, n * k).reshape(k, n).T
    rho = G @ G.conj().T
    rho = rho / np.trace(rho).real
    return (rho + rho.conj().T) / 2


def pure_to_density(x):
    x = check_pure_state(x)
    return np.outer(x, x.conj())


def max_amplitude(x):
    """The largest modulus of the state's amplitudes."""
    return float(np.abs(np.asarray(x)).max())


def canonicalize(x):
    """Drop phases and sort amplitudes descending.

    Permutations and diagonal unitaries leave every basis-dependent coherence
    measure unchanged, so the result is an equivalent representative with
    the largest amplitude first.
    """
    x = check_pure_state(x)
    return np.sort(np.abs(x))[::-1].astype(complex)


def is_incoherent(rho, tol=1e-10):
    """True iff every off-diagonal entry has modulus at most ``tol``."""
    rho = np.asarray(rho)
    off = rho - np.diag(np.diag(rho))
    return bool(np.abs(off).max(initial=0.0) <= tol)


def block_direct_sum(p1, rho1, p2, rho2):
    """Block-diagonal state ``p1 rho1 (+) p2 rho2``."""
    p1 = check_probability(p1, "p1")
    p2 = check_probability(p2, "p2")
    if abs(p1 + p2 - 1.0) > 1e-12:
        raise ValidationError(f"p1 + p2 must equal 1, got {p1 + p2!r}")
    rho1 = check_density_matrix(rho1)
    rho2 = check_density_matrix(rho2)
    n1, n2 = rho1.shape[0], rho2.shape[0]
    out = np.zeros((n1 + n2, n1 + n2), dtype=complex)
    out[:n1, :n1] = p1 * rho1
    out[n1:, n1:] = p2 * rho2
    return out


def maximally_coherent(n):
    return np.full((n, n), 1.0 / n, dtype=complex)


def plus_state():
    return np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
