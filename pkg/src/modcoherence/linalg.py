"""Dense Hermitian linear algebra used throughout the package.

All functions are pure and accept array-likes.  Tolerances are absolute for
matrices of Frobenius norm at most one and scale with the norm above that.
"""

from dataclasses import dataclass

import numpy as np

from .validation import ValidationError, _scaled, as_complex_matrix, check_hermitian


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending and the matching unit eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T


def _sort_descending(w, U):
    # stable sort on -w keeps ties in their original index order
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], U[:, order])


def hermitian_eig(H, method="lapack"):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    H : array_like, shape (n, n)
        Hermitian within ``1e-12`` (entrywise, absolute).
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls ``numpy.linalg.eigh``; ``"jacobi"`` runs the
        cyclic Jacobi sweep in :func:`jacobi_eig`.

    Returns
    -------
    EigenDecomposition
        Eigenvalues in descending order, ties kept in index order.
    """
    H = check_hermitian(H)
    if method == "lapack":
        w, U = np.linalg.eigh(H)
        return _sort_descending(w, U)
    if method == "jacobi":
        return jacobi_eig(H)
    raise ValidationError(f"unknown eigensolver {method!r}")


def jacobi_eig(H, tol=1e-14, max_sweeps=100):
    """Cyclic complex Jacobi eigensolver.

    Each pivot (p, q) is annihilated by a phase rotation that makes the
    pivot real followed by a real Givens rotation.  Sweeps stop once the
    off-diagonal Frobenius mass is at most ``tol * ||H||_F``.
    """
    A = check_hermitian(H).copy()
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                h = A[p, q]
                mag = abs(h)
                if mag <= 1e-300:
                    continue
                phase = h / mag
                a, b = A[p, p].real, A[q, q].real
                tau = (b - a) / (2 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1 + tau * tau))
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]] acting on columns p, q
                jp = np.array([c, -s * np.conj(phase)])
                jq = np.array([s, c * np.conj(phase)])
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = colp * jp[0] + colq * jp[1]
                A[:, q] = colp * jq[0] + colq * jq[1]
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = rowp * np.conj(jp[0]) + rowq * np.conj(jp[1])
                A[q, :] = rowp * np.conj(jq[0]) + rowq * np.conj(jq[1])
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = vp * jp[0] + vq * jp[1]
                V[:, q] = vp * jq[0] + vq * jq[1]
    return _sort_descending(np.diag(A).real.copy(), V)


def eigvalsh(H):
    return np.linalg.eigvalsh(check_hermitian(H))


def trace_norm(H):
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.abs(eigvalsh(H)).sum())


def operator_norm(H):
    """Largest absolute eigenvalue of a Hermitian matrix."""
    return float(np.abs(eigvalsh(H)).max())


def block_2x2(X, Y, Z):
    """Assemble ``[[X, Y], [Y^dagger, Z]]`` from n x n blocks."""
    X = check_hermitian(X, name="X")
    Z = check_hermitian(Z, name="Z")
    Y = as_complex_matrix(Y, "Y")
    n = X.shape[0]
    if Z.shape != (n, n) or Y.shape != (n, n):
        raise ValidationError(
            f"block shapes do not match: X {X.shape}, Y {Y.shape}, Z {Z.shape}")
    return np.block([[X, Y], [Y.conj().T, Z]])


def psd_check(H, tol=0.0):
    """True iff the smallest eigenvalue of ``H`` is at least ``-tol`` (norm-scaled above 1)."""
    H = check_hermitian(H)
    return bool(np.linalg.eigvalsh(H)[0] >= -_scaled(tol, H))
