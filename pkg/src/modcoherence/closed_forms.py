"""Exact values, optimal witnesses and dual certificates for the modified
trace distance of coherence on qubits and pure states.

The modified measure is

    C'(rho) = min { ||rho - D||_tr : D diagonal, D >= 0 },

equivalently the distance to ``p * delta`` for an incoherent state ``delta``
and a scale ``p >= 0``.  Its dual feasible points ``(X, Y, Z)`` satisfy
``[[X, Y], [Y^dagger, Z]] >= 0``, ``||X||, ||Z|| <= 1/2`` and ``diag(Y) = 0``,
and each one certifies the lower bound ``-tr(rho (Y + Y^dagger))``.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import block_2x2, operator_norm
from .states import SQRT_HALF, max_amplitude
from .validation import ValidationError, check_density_matrix, check_pure_state

CERT_TOL = 1e-10


class InfeasibleCertificateError(ValidationError):
    """A dual certificate violates one of its constraints."""

    def __init__(self, constraint, residual):
        self.constraint = constraint
        self.residual = residual
        super().__init__(f"certificate violates {constraint} (residual {residual:.3e})")


@dataclass(frozen=True)
class IncoherentWitness:
    """A feasible point ``p * delta`` of the primal problem.

    ``delta`` holds the diagonal of an incoherent state.  ``mu`` records the
    qubit family parameter when the witness came from
    :func:`qubit_optimal_set`.
    """

    scale: float
    delta: np.ndarray
    mu: Optional[float] = None

    @property
    def diagonal(self):
        return self.scale * self.delta

    def residual(self, rho):
        return np.asarray(rho) - np.diag(self.diagonal)


@dataclass(frozen=True)
class DualCertificate:
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    construction: str
    phases: Optional[np.ndarray] = None
    companion: tuple = field(default=())


def l1_coherence(rho):
    """Sum of the moduli of all off-diagonal entries."""
    rho = np.asarray(rho)
    return float(np.abs(rho).sum() - np.abs(np.diag(rho)).sum())


def _check_qubit(rho):
    rho = check_density_matrix(rho)
    if rho.shape != (2, 2):
        raise ValidationError(f"expected a 2 x 2 density matrix, got shape {rho.shape}")
    return rho


def qubit_mod_trace(rho):
    """``2 |rho_12|`` for a qubit density matrix."""
    rho = _check_qubit(rho)
    return 2.0 * float(abs(rho[0, 1]))


def qubit_mu_interval(rho):
    """Range of ``mu`` for which ``diag(rho_11 - mu, rho_22 - mu)`` is optimal.

    The lower end is ``-|rho_12|``.  The upper end is the smallest of
    ``|rho_12|`` (beyond it the residual norm becomes ``2 mu``) and the
    diagonal entries (positivity of the witness).
    """
    rho = _check_qubit(rho)
    c = float(abs(rho[0, 1]))
    return -c, min(c, rho[0, 0].real, rho[1, 1].real)


def qubit_optimal_set(rho, mu):
    """Member ``diag(rho_11 - mu, rho_22 - mu)`` of the qubit optimal family.

    Encoded as ``scale = 1 - 2 mu`` and ``delta`` the normalized diagonal;
    a zero scale carries the uniform ``delta`` by convention.
    """
    lo, hi = qubit_mu_interval(rho)
    rho = np.asarray(rho, dtype=complex)
    mu = float(mu)
    if not lo - 1e-15 <= mu <= hi + 1e-15:
        raise ValidationError(f"mu = {mu} outside the optimal interval [{lo}, {hi}]")
    diag = np.maximum(np.real(np.diag(rho)) - mu, 0.0)
    p = float(diag.sum())
    delta = diag / p if p > 0 else np.full(2, 0.5)
    return IncoherentWitness(scale=p, delta=delta, mu=mu)


def mod_trace_of_max_amplitude(a):
    """C' of any pure state whose largest amplitude modulus is ``a``."""
    a = np.asarray(a, dtype=float)
    val = 2 * a * np.sqrt(np.clip(1 - a * a, 0.0, None))
    out = np.where(a <= SQRT_HALF, 1.0, val)
    return float(out) if out.ndim == 0 else out


def pure_mod_trace(x):
    """Closed form of C'(|x><x|): 1 if ``max|x_j| <= 1/sqrt(2)``, else ``2a sqrt(1 - a^2)``."""
    x = check_pure_state(x)
    return mod_trace_of_max_amplitude(max_amplitude(x))


def pure_optimal_witness(x):
    """Optimal ``(p, delta)`` for a pure state.

    Below the threshold ``p = 0`` (``delta`` uniform by convention);
    above it ``p = 2a^2 - 1`` with ``delta`` a point mass on the largest
    amplitude.
    """
    x = check_pure_state(x)
    n = x.size
    mags = np.abs(x)
    a = float(mags.max())
    if a <= SQRT_HALF:
        return IncoherentWitness(scale=0.0, delta=np.full(n, 1.0 / n))
    delta = np.zeros(n)
    delta[int(np.argmax(mags))] = 1.0
    return IncoherentWitness(scale=2 * a * a - 1, delta=delta)


def _check_canonical(x):
    x = check_pure_state(x)
    if np.abs(x.imag).max() > 1e-12 or x.real.min() < -1e-12 or np.any(np.diff(x.real) > 1e-12):
        raise ValidationError("expected a canonicalized state (real, nonnegative, descending)")
    return x.real.copy()


def witness_eigenpair(x):
    """Nonzero eigenvalues and unnormalized eigenvectors of ``|x><x| - p delta``.

    Returns ``(lam_plus, lam_minus, v_plus, v_minus)`` where
    ``lam_pm = (1 - x1^2) +- x1 sqrt(1 - x1^2)`` and
    ``v_pm = (+-sqrt(1 - x1^2), x2, ..., xn)``.
    """
    x = _check_canonical(x)
    x1 = x[0]
    if x1 <= SQRT_HALF:
        raise ValidationError("witness eigenpair requires max amplitude > 1/sqrt(2)")
    s = np.sqrt(max(1 - x1 * x1, 0.0))
    lam_p = (1 - x1 * x1) + x1 * s
    lam_m = (1 - x1 * x1) - x1 * s
    v_p = x.copy()
    v_m = x.copy()
    v_p[0] = s
    v_m[0] = -s
    return lam_p, lam_m, v_p, v_m


def _triangle_phases(a, b, c):
    """Directions of three vectors with lengths a, b, c summing to zero (first along 0)."""
    if b == 0 or a == 0:
        return 0.0, 0.0, np.pi
    if c == 0:
        return 0.0, np.pi, 0.0
    cos_b = np.clip((a * a + b * b - c * c) / (2 * a * b), -1.0, 1.0)
    phi_b = np.pi - np.arccos(cos_b)
    end = a + b * np.exp(1j * phi_b)
    phi_c = np.angle(-end) if abs(end) > 0 else 0.0
    return 0.0, phi_b, phi_c


def _refine_phases(w, rng, tol=1e-10, starts=20, iters=2000):
    best, best_res = None, np.inf
    for _ in range(starts):
        theta = rng.uniform(0, 2 * np.pi, w.size)
        for _ in range(iters):
            s = np.sum(w * np.exp(1j * theta))
            res = abs(s)
            if res <= tol:
                break
            # each phase moves halfway towards pointing against the rest of the sum
            rest = s - w * np.exp(1j * theta)
            target = np.angle(-rest)
            theta = theta + 0.5 * np.angle(np.exp(1j * (target - theta)))
        res = abs(np.sum(w * np.exp(1j * theta)))
        if res < best_res:
            best, best_res = theta, res
        if best_res <= tol:
            break
    return best


def close_phase_polygon(w):
    """Phases ``theta`` with ``sum_j exp(i theta_j) w_j = 0`` and ``theta_1 = 0``.

    Requires nonnegative weights summing to one with none above one half.
    The weights are split greedily (largest first, into the lightest of
    three groups) and the three group totals are laid out as a triangle.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size == 0 or np.any(w < 0):
        raise ValidationError("weights must be a non-empty nonnegative vector")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValidationError(f"weights must sum to 1, got {w.sum()!r}")
    if w.max() > 0.5 + 1e-12:
        raise ValidationError(f"largest weight {w.max()} exceeds 1/2: polygon cannot close")
    order = np.argsort(-w, kind="stable")
    totals = np.zeros(3)
    group = np.empty(w.size, dtype=int)
    for j in order:
        g = int(np.argmin(totals))
        group[j] = g
        totals[g] += w[j]
    if totals.max() <= 0.5 + 1e-12:
        phis = np.array(_triangle_phases(*totals))
        theta = phis[group]
    else:  # pragma: no cover - greedy split always satisfies the bound
        theta = _refine_phases(w, np.random.default_rng(0))
    theta = np.mod(theta - theta[0], 2 * np.pi)
    return theta


def dual_certificate_pure(x):
    """Dual certificate matching :func:`pure_mod_trace` for a canonicalized state.

    Below the threshold ``Y = (|y><y| - |x><x|)/2`` where ``y`` carries the
    moduli of ``x`` with phases closing the polygon of weights ``|x_j|^2``.
    Above it ``Y = (|v-><v-| - |v+><v+|)/2`` with ``v+-`` the normalized
    eigenvectors of :func:`witness_eigenpair`.  In both cases ``X = Z = I/2``.
    """
    x = _check_canonical(x)
    n = x.size
    half = np.eye(n) / 2
    x1 = x[0]
    if x1 <= SQRT_HALF:
        theta = close_phase_polygon(x * x / np.sum(x * x))
        y = np.exp(1j * theta) * x
        Y = (np.outer(y, y.conj()) - np.outer(x, x)) / 2
        return DualCertificate(half, Y, half.copy(), "case_a", phases=theta, companion=(y,))
    s2 = 1 - x1 * x1
    if s2 <= 0:
        return DualCertificate(half, np.zeros((n, n), complex), half.copy(), "case_b")
    _, _, v_p, v_m = witness_eigenpair(x)
    norm = np.sqrt(2 * s2)
    v_p = v_p / norm
    v_m = v_m / norm
    Y = (np.outer(v_m, v_m) - np.outer(v_p, v_p)) / 2
    return DualCertificate(half, Y.astype(complex), half.copy(), "case_b", companion=(v_p, v_m))


def certificate_residuals(cert):
    """Constraint residuals of a dual certificate (zero or negative means satisfied)."""
    Y = np.asarray(cert.Y)
    block = block_2x2(cert.X, Y, cert.Z)
    return {
        "diag(Y) = 0": float(np.abs(np.diag(Y)).max()),
        "||X|| <= 1/2": operator_norm(cert.X) - 0.5,
        "||Z|| <= 1/2": operator_norm(cert.Z) - 0.5,
        "block PSD": float(-np.linalg.eigvalsh(block)[0]),
    }


def verify_dual(cert, rho, tol=CERT_TOL):
    """Check feasibility and return the dual objective ``-tr(rho (Y + Y^dagger))``.

    By weak duality the returned value is a lower bound on C'(rho).

    Raises
    ------
    InfeasibleCertificateError
        Naming the first violated constraint.
    """
    rho = check_density_matrix(rho)
    for name, res in certificate_residuals(cert).items():
        if res > tol:
            raise InfeasibleCertificateError(name, res)
    Y = np.asarray(cert.Y)
    if Y.shape != rho.shape:
        raise ValidationError(f"certificate dimension {Y.shape} does not match state {rho.shape}")
    return float(-np.trace(rho @ (Y + Y.conj().T)).real)


def trivial_certificate(n):
    half = np.eye(n) / 2
    return DualCertificate(half, np.zeros((n, n), complex), half.copy(), "trivial")


def range_projector_margin(rho, rank_tol=1e-9):
    """Largest diagonal entry of the projector onto the range of ``rho``.

    C'(rho) = 1 exactly when this is at most 1/2: the matrix ``2P - I`` is
    then a dual point with objective 1, while an entry above 1/2 gives a
    descent direction away from ``D = 0``.
    """
    rho = check_density_matrix(rho)
    w, U = np.linalg.eigh(rho)
    V = U[:, w > rank_tol]
    return float((np.abs(V) ** 2).sum(axis=1).max())
