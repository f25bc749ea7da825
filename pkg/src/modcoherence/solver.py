"""Numerical minimization of ||rho - diag(d)||_tr.

Two feasible sets are supported: the nonnegative orthant (the modified
trace distance of coherence) and the probability simplex (the standard
trace distance of coherence).

The default engine is a primal-dual hybrid gradient iteration on the saddle
problem

    min_{d in F}  max_{||W|| <= 1}  tr(W (rho - diag d)).

The primal update is a projected gradient step on ``d``, so it is a
projected subgradient method whose subgradient comes from the dual iterate.
The dual iterate is turned into a certified lower bound at every check, so
``converged`` means the reported value is provably within
``target_accuracy`` of the minimum.  A plain projected subgradient method
(diminishing or Polyak-type steps) is available via ``method="subgradient"``.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .closed_forms import pure_mod_trace, pure_optimal_witness, qubit_mod_trace
from .states import haar_pure, random_density, substream
from .validation import ValidationError, check_density_matrix

ZERO_EIG = 1e-12


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 5000
    target_accuracy: float = 1e-7
    step_schedule: str = "polyak"
    restarts: int = 2
    method: str = "pdhg"
    warm_start: bool = True
    witness_start: bool = True
    primal_step: float = 0.1
    dual_step: float = 9.0
    check_every: int = 5
    balance_every: int = 100
    stall_window: int = 200

    def __post_init__(self):
        if not self.target_accuracy > 0:
            raise ValidationError("target_accuracy must be positive")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be positive")
        if self.restarts < 0:
            raise ValidationError("restarts must be nonnegative")
        if self.step_schedule not in ("diminishing", "polyak"):
            raise ValidationError(f"unknown step schedule {self.step_schedule!r}")
        if self.method not in ("pdhg", "subgradient"):
            raise ValidationError(f"unknown method {self.method!r}")
        if self.primal_step * self.dual_step >= 1:
            raise ValidationError("primal_step * dual_step must be below 1")


@dataclass
class SolverResult:
    value: float
    diagonal: np.ndarray
    iterations: int
    best_lower_bound: Optional[float]
    converged: bool
    history: list = field(default_factory=list, repr=False)

    @property
    def gap(self):
        if self.best_lower_bound is None:
            return np.inf
        return self.value - self.best_lower_bound


def _eig(A):
    return np.linalg.eigh(A)


def _objective(rho, d):
    return float(np.abs(np.linalg.eigvalsh(rho - np.diag(d))).sum())


def _sign_matrix(w, U, zero_sign=0.0):
    s = np.sign(w)
    s[np.abs(w) < ZERO_EIG] = zero_sign
    return (U * s) @ U.conj().T


def subgradient_step(rho, d):
    """Value and a subgradient of ``d -> ||rho - diag(d)||_tr``.

    With ``rho - diag(d) = U diag(lam) U^dagger`` the subgradient is
    ``-diag(U sgn(lam) U^dagger)``, taking ``sgn`` of eigenvalues below
    1e-12 in modulus as zero.
    """
    rho = np.asarray(rho, dtype=complex)
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValidationError("d must be nonnegative")
    w, U = _eig(rho - np.diag(d))
    S = _sign_matrix(w, U)
    return float(np.abs(w).sum()), -np.real(np.diag(S))


class _Problem:
    """Feasible set, projection and dual bound for one of the two measures."""

    def __init__(self, rho, simplex):
        self.rho = rho
        self.n = rho.shape[0]
        self.simplex = simplex

    def project(self, v):
        if not self.simplex:
            return np.maximum(v, 0.0)
        return project_simplex(v)

    def lower_bound(self, W):
        """Lower bound on the minimum certified by any ``W`` with ``||W|| <= 1``.

        It is the Lagrangian ``min_{d in F} tr(W (rho - diag d))``.  On the
        orthant the minimum is restricted to ``sum(d) <= 2``, which contains
        every minimizer because ``||rho - D||_tr >= tr(D) - 1`` while
        ``d = 0`` already gives 1.
        """
        rho = self.rho
        wd = np.real(np.diag(W))
        base = float(np.real(np.vdot(W.conj().T, rho)))  # tr(W rho)
        if self.simplex:
            return base - float(wd.max())
        bound = base - 2.0 * max(0.0, float(wd.max()))
        # shifting the positive diagonal out and rescaling gives a second candidate
        if wd.max() > 0:
            W2 = W - np.diag(np.maximum(wd, 0.0))
            nrm = float(np.abs(np.linalg.eigvalsh(W2)).max())
            if nrm > 1:
                W2 = W2 / nrm
            bound = max(bound, float(np.real(np.vdot(W2.conj().T, rho))))
        return bound

    def starts(self, options):
        rho, n = self.rho, self.n
        diag = np.real(np.diag(rho)).copy()
        if self.simplex:
            points = [diag, np.full(n, 1.0 / n)]
        else:
            points = [np.zeros(n), diag]
        if options.witness_start:
            w, U = _eig(rho)
            if w[-1] >= 1 - 1e-9:
                wit = pure_optimal_witness(U[:, -1] / np.linalg.norm(U[:, -1]))
                cand = wit.diagonal
                points.append(self.project(cand) if self.simplex else cand)
        return points


def project_simplex(v):
    """Euclidean projection onto the probability simplex (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    r = np.nonzero(u - css / idx > 0)[0][-1]
    shift = css[r] / (r + 1)
    return np.maximum(v - shift, 0.0)


def _initial_dual(problem, d):
    """Best of the sign-matrix dual points at ``d`` (kernel mapped to 0 or -1)."""
    w, U = _eig(problem.rho - np.diag(d))
    best_W, best_lb = np.zeros_like(problem.rho), 0.0
    for zero_sign in (0.0, -1.0):
        W = _sign_matrix(w, U, zero_sign)
        lb = problem.lower_bound(W)
        if lb > best_lb:
            best_W, best_lb = W, lb
    return best_W, best_lb


def _pdhg(problem, d0, W0, best, best_d, best_lb, options, tau, sigma, budget, history):
    rho = problem.rho
    d = d0.copy()
    W = W0.copy()
    # primal weight omega = sqrt(sigma / tau) is rebalanced from observed movement
    eta, omega = np.sqrt(tau * sigma), np.sqrt(sigma / tau)
    d_anchor, W_anchor = d.copy(), W.copy()
    last_improve, ref_best, ref_lb = 0, best, best_lb
    it = 0
    for it in range(1, budget + 1):
        d_new = problem.project(d + tau * np.real(np.diag(W)))
        d_bar = 2 * d_new - d
        d = d_new
        w, U = _eig(W + sigma * (rho - np.diag(d_bar)))
        W = (U * np.clip(w, -1.0, 1.0)) @ U.conj().T
        if options.balance_every and it % options.balance_every == 0:
            dx = np.linalg.norm(d - d_anchor)
            dy = np.linalg.norm(W - W_anchor)
            if dx > 1e-10 and dy > 1e-10:
                omega = np.sqrt(omega * dy / dx)
                tau, sigma = eta / omega, eta * omega
            d_anchor, W_anchor = d.copy(), W.copy()
        if it % options.check_every:
            continue
        f = _objective(rho, d)
        if f < best:
            best, best_d = f, d.copy()
        best_lb = max(best_lb, problem.lower_bound(W))
        history.append((best, best_lb))
        if best - best_lb <= options.target_accuracy:
            break
        if best < ref_best * (1 - 1e-12) or best_lb > ref_lb + 1e-12 * max(1.0, abs(ref_lb)):
            last_improve, ref_best, ref_lb = it, best, best_lb
        elif it - last_improve >= options.stall_window:
            break
    return best, best_d, best_lb, it


def _subgradient(problem, d0, best, best_d, best_lb, options, budget, history):
    rho = problem.rho
    d = d0.copy()
    level_gap = 0.1
    path, ref = 0.0, best
    last_improve, ref_best = 0, best
    it = 0
    for it in range(1, budget + 1):
        w, U = _eig(rho - np.diag(d))
        f = float(np.abs(w).sum())
        S = _sign_matrix(w, U)
        g = -np.real(np.diag(S))
        if f < best:
            best, best_d = f, d.copy()
        if it % options.check_every == 0:
            best_lb = max(best_lb, problem.lower_bound(S), problem.lower_bound(_sign_matrix(w, U, -1.0)))
            history.append((best, best_lb))
            if best - best_lb <= options.target_accuracy:
                break
        gg = float(g @ g)
        if gg < 1e-30:
            best_lb = max(best_lb, f)  # zero subgradient: d is optimal
            break
        if options.step_schedule == "polyak":
            level = max(best - level_gap, best_lb)
            step = max(f - level, 1e-16) / gg
        else:
            step = 0.1 / np.sqrt(it)
        d_new = problem.project(d - step * g)
        path += float(np.linalg.norm(d_new - d))
        d = d_new
        if best <= ref - level_gap / 2:
            ref, path = best, 0.0
        elif path > 2.0:
            level_gap, ref, path = level_gap / 2, best, 0.0
        if best < ref_best * (1 - 1e-12):
            last_improve, ref_best = it, best
        elif it - last_improve >= options.stall_window:
            break
    return best, best_d, best_lb, it


def _solve(rho, options, simplex):
    rho = check_density_matrix(rho)
    options = options or SolverOptions()
    problem = _Problem(rho, simplex)
    starts = problem.starts(options)
    values = [_objective(rho, s) for s in starts]
    order = np.argsort(values, kind="stable")
    best = float(values[order[0]])
    best_d = starts[order[0]].copy()
    best_lb = 0.0  # the objective is a norm
    history = []
    total = 0
    # step-size pairs tried on successive restarts (product kept below 1)
    step_pairs = [(options.primal_step, options.dual_step), (0.3, 3.0), (0.9, 0.9)]
    for attempt in range(options.restarts + 1):
        if best - best_lb <= options.target_accuracy or total >= options.max_iterations:
            break
        d0 = starts[order[attempt % len(starts)]]
        if options.warm_start:
            W0, lb0 = _initial_dual(problem, d0)
            best_lb = max(best_lb, lb0)
        else:
            W0 = np.zeros_like(rho)
        if best - best_lb <= options.target_accuracy:
            break
        budget = options.max_iterations - total
        if options.method == "pdhg":
            tau, sigma = step_pairs[attempt % len(step_pairs)]
            best, best_d, best_lb, used = _pdhg(
                problem, d0, W0, best, best_d, best_lb, options, tau, sigma, budget, history)
        else:
            best, best_d, best_lb, used = _subgradient(
                problem, d0, best, best_d, best_lb, options, budget, history)
        total += used
    best_lb = min(best_lb, best)
    return SolverResult(
        value=float(best),
        diagonal=np.asarray(best_d, dtype=float),
        iterations=total,
        best_lower_bound=float(best_lb),
        converged=bool(best - best_lb <= options.target_accuracy),
        history=history,
    )


def mod_trace_distance(rho, options=None):
    """Modified trace distance of coherence: minimum of ``||rho - D||_tr`` over diagonal ``D >= 0``.

    Parameters
    ----------
    rho : array_like, shape (n, n)
        Density matrix.
    options : SolverOptions, optional

    Returns
    -------
    SolverResult
        ``value`` is the best objective seen over all iterates and restarts
        (never above 1, the value at ``D = 0``); ``diagonal`` attains it.
    """
    return _solve(rho, options, simplex=False)


def trace_distance_coherence(rho, options=None):
    """Standard trace distance of coherence: ``D`` restricted to diagonal density matrices."""
    return _solve(rho, options, simplex=True)


@dataclass
class CrossValidationReport:
    rows: list

    @property
    def max_discrepancy(self):
        return max((r["max_discrepancy"] for r in self.rows), default=0.0)

    @property
    def all_converged(self):
        return all(r["converged"] == r["samples"] for r in self.rows)


def cross_validate(n_dims, samples_per_dim, seed=42, options=None):
    """Compare the solver with the closed forms on random states.

    For each dimension: Haar pure states against the pure-state formula, a
    random incoherent state (expected value 0) and, for ``n = 2``, full-rank
    qubit states against ``2 |rho_12|``.
    """
    rows = []
    for n in n_dims:
        if n < 2:
            raise ValidationError("cross-validation dimensions must be at least 2")
        families = {"pure": [], "incoherent": []}
        if n == 2:
            families["qubit"] = []
        for i in range(samples_per_dim):
            rng = substream(seed, n, i)
            x = haar_pure(n, rng)
            families["pure"].append((np.outer(x, x.conj()), pure_mod_trace(x)))
            p = rng.dirichlet(np.ones(n))
            families["incoherent"].append((np.diag(p).astype(complex), 0.0))
            if n == 2:
                rho = random_density(2, 2, rng)
                families["qubit"].append((rho, qubit_mod_trace(rho)))
        for family, cases in families.items():
            worst, converged = 0.0, 0
            for rho, expected in cases:
                res = mod_trace_distance(rho, options)
                worst = max(worst, abs(res.value - expected))
                converged += res.converged
            rows.append({"n": n, "family": family, "samples": len(cases),
                         "max_discrepancy": worst, "converged": converged})
    return CrossValidationReport(rows)
