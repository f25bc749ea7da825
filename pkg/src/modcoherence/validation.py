"""Input validation helpers shared by every public entry point."""

import numpy as np


class ValidationError(ValueError):
    """Raised when an input violates a documented invariant."""


def _scaled(tol, a):
    # absolute below unit norm, relative to the Frobenius norm above it
    return tol * max(1.0, float(np.linalg.norm(a)))


def as_complex_matrix(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise ValidationError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains non-finite entries")
    return a.astype(complex)


def check_hermitian(a, tol=1e-12, name="matrix"):
    """Return ``a`` as a complex Hermitian array, raising if it is not square or Hermitian."""
    a = as_complex_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {a.shape}")
    err = np.abs(a - a.conj().T).max()
    if err > _scaled(tol, a):
        raise ValidationError(f"{name} is not Hermitian (max |H - H^dagger| = {err:.3e})")
    return (a + a.conj().T) / 2


def check_pure_state(x, tol=1e-12):
    """Validate a state vector: 1-D, finite, unit Euclidean norm."""
    x = np.asarray(x)
    if x.ndim != 1 or x.size == 0:
        raise ValidationError(f"pure state must be a non-empty 1-D array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("pure state contains non-finite entries")
    x = x.astype(complex)
    norm = np.linalg.norm(x)
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"pure state is not normalized (norm = {norm:.15g})")
    return x


def check_density_matrix(rho, tol=1e-10):
    """Validate a density matrix: Hermitian, positive semidefinite, unit trace.

    The error message names the violated invariant (``Hermitian``, ``PSD``
    or ``trace``) so that callers can report it verbatim.
    """
    rho = check_hermitian(rho, name="density matrix")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"density matrix violates trace = 1 (trace = {tr:.15g})")
    lam_min = np.linalg.eigvalsh(rho)[0]
    if lam_min < -tol:
        raise ValidationError(f"density matrix violates PSD (min eigenvalue = {lam_min:.3e})")
    return rho


def check_probability(p, name="p"):
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {p}")
    return p


def check_states(X):
    """Coerce a batch of states into a list of density matrices.

    ``X`` may be a 2-D array of state vectors (one per row), a 3-D array of
    density matrices, or a sequence mixing both.
    """
    if isinstance(X, np.ndarray) and X.ndim == 2 and X.shape[0] != X.shape[1]:
        items = list(X)
    elif isinstance(X, np.ndarray) and X.ndim == 3:
        items = list(X)
    elif isinstance(X, np.ndarray) and X.ndim == 2:
        # square 2-D input is ambiguous; treat rows as state vectors only if all are unit norm
        norms = np.linalg.norm(X, axis=1)
        items = list(X) if np.allclose(norms, 1.0, atol=1e-12) else [X]
    else:
        items = list(X)
    out = []
    for item in items:
        item = np.asarray(item)
        if item.ndim == 1:
            x = check_pure_state(item)
            out.append(np.outer(x, x.conj()))
        else:
            out.append(check_density_matrix(item))
    if not out:
        raise ValidationError("no states supplied")
    return out
