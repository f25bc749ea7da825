"""Monte Carlo and exact proportions of states with C' = 1, plus the
proper-measure property suites.

Sample ``i`` of a run with master seed ``s`` in dimension ``n`` and rank
``k`` always draws from ``substream(s, n, k, i)``, and results are counted,
so every report is reproducible bit for bit regardless of how samples are
distributed over workers.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, stats

from .closed_forms import pure_mod_trace, qubit_mod_trace
from .solver import SolverOptions, mod_trace_distance, subgradient_step
from .states import (SQRT_HALF, block_direct_sum, haar_pure, is_incoherent,
                     random_density, substream)
from .validation import ValidationError
from .verification import SuiteReport

CI_LEVEL = 0.99
DEFAULT_CLASSIFICATION_TOL = 1e-6


@dataclass
class ProportionReport:
    dim: int
    rank: int
    samples: int
    hits: int
    estimate: float
    ci_halfwidth: float
    exact: Optional[float] = None
    excluded: int = 0
    seed: Optional[int] = None

    @property
    def flagged(self):
        """True when the estimate sits more than five half-widths from the exact value."""
        if self.exact is None:
            return False
        return abs(self.estimate - self.exact) > 5 * max(self.ci_halfwidth, 1e-300)


@dataclass
class SweepConfig:
    dims: range
    ranks: range
    samples: int
    seed: int = 42
    classification_tol: float = DEFAULT_CLASSIFICATION_TOL
    solver: SolverOptions = field(default_factory=SolverOptions)

    def pairs(self):
        """(n, k) pairs sorted by rank then dimension."""
        return [(n, k) for k in self.ranks for n in self.dims]


def worker_count():
    """Worker cap from ``COHERENCE_THREADS`` (default: CPU count)."""
    raw = os.environ.get("COHERENCE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValidationError(f"COHERENCE_THREADS must be an integer, got {raw!r}")
    return os.cpu_count() or 1


def _parallel_map(fn, items):
    items = list(items)
    workers = min(worker_count(), max(1, len(items)))
    if workers == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def exact_proportion(n):
    """Haar proportion of pure states in C^n with C' = 1, i.e. ``1 - n / 2^(n-1)``."""
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    return 1.0 - n / 2.0 ** (n - 1)


def f_density(n, x):
    """Density of the F(2, 2n - 2) distribution, ``((n - 1) / (x + n - 1))^n``."""
    return ((n - 1) / (x + n - 1)) ** n


def f_tail_integral(n):
    """Numerical ``int_{n-1}^inf f_density(n, x) dx`` (equals ``2^(1-n)``)."""
    val, _ = integrate.quad(lambda x: f_density(n, x), n - 1, np.inf, epsabs=1e-14, epsrel=1e-13)
    return val


def ci_halfwidth(hits, samples, level=CI_LEVEL):
    """Half-width of a two-sided confidence interval for a binomial proportion.

    Normal approximation, except Clopper-Pearson (largest distance from the
    estimate to either end) when fewer than 10 hits or misses.
    """
    p = hits / samples
    if hits < 10 or samples - hits < 10:
        alpha = 1 - level
        lo = stats.beta.ppf(alpha / 2, hits, samples - hits + 1) if hits > 0 else 0.0
        hi = stats.beta.ppf(1 - alpha / 2, hits + 1, samples - hits) if hits < samples else 1.0
        return float(max(p - lo, hi - p))
    z = stats.norm.ppf(0.5 + level / 2)
    return float(z * np.sqrt(p * (1 - p) / samples))


def _report(n, k, samples, hits, excluded, seed, exact=None):
    used = samples - excluded
    est = hits / used if used else float("nan")
    half = ci_halfwidth(hits, used) if used else float("nan")
    return ProportionReport(n, k, used, hits, est, half, exact, excluded, seed)


def mc_pure_proportion(n, samples, seed=42):
    """Fraction of Haar pure states with largest amplitude at most ``1/sqrt(2)``.

    That event is exactly ``C' = 1``, so no optimization is needed.
    """
    if n < 2 or samples < 1:
        raise ValidationError("need n >= 2 and samples >= 1")

    def hit(i):
        x = haar_pure(n, substream(seed, n, 1, i))
        return bool(np.abs(x).max() <= SQRT_HALF)

    hits = sum(_parallel_map(hit, range(samples)))
    return _report(n, 1, samples, hits, 0, seed, exact_proportion(n))


def classify_sample(n, k, seed, i, options, classification_tol):
    """Solve sample ``i`` and return ``(is_hit, converged)``."""
    rho = random_density(n, k, substream(seed, n, k, i))
    res = mod_trace_distance(rho, options)
    return res.value >= 1 - classification_tol, res.converged


def mc_rank_proportion(n, k, samples, seed=42, classification_tol=DEFAULT_CLASSIFICATION_TOL,
                       options=None):
    """Fraction of rank-``k`` random density matrices with solver value ``>= 1 - tol``.

    Samples on which the solver cannot certify its accuracy are excluded and
    counted in ``excluded``.
    """
    if not 1 <= k <= n:
        raise ValidationError(f"need 1 <= k <= n, got n={n}, k={k}")
    options = options or SolverOptions()
    results = _parallel_map(lambda i: classify_sample(n, k, seed, i, options, classification_tol),
                            range(samples))
    hits = sum(h for h, ok in results if ok)
    excluded = sum(not ok for _, ok in results)
    exact = exact_proportion(n) if k == 1 else None
    return _report(n, k, samples, hits, excluded, seed, exact)


def fifty_percent_crossing(k, samples, seed=42, max_n=60, classification_tol=DEFAULT_CLASSIFICATION_TOL):
    """Smallest dimension at which at least half of the rank-``k`` states have C' = 1.

    Rank one uses the exact proportion; higher ranks scan ``n = k, k+1, ...``
    with :func:`mc_rank_proportion`.
    """
    if k < 1:
        raise ValidationError("k must be positive")
    for n in range(max(k, 1), max_n + 1):
        if k == 1:
            p = exact_proportion(n)
        else:
            p = mc_rank_proportion(n, k, samples, seed, classification_tol).estimate
        if p >= 0.5:
            return n
    raise ValidationError(f"no crossing found up to n = {max_n}")


def sweep(config):
    """One :class:`ProportionReport` per feasible (n, k), sorted by (k, n); infeasible pairs give None."""
    out = []
    for n, k in config.pairs():
        if k > n:
            out.append((n, k, None))
            continue
        rep = mc_rank_proportion(n, k, config.samples, config.seed,
                                 config.classification_tol, config.solver)
        out.append((n, k, rep))
    return out


def _qubit_state(rng):
    return random_density(2, 2, rng)


def block_additivity_suite(trials, seed=42, options=None, tol=1e-5):
    """Check ``C'(p1 rho1 (+) p2 rho2) = p1 C'(rho1) + p2 C'(rho2)``.

    Three families: ``p1 = 1`` with a trivial 1-dimensional second block,
    two qubit blocks (parts from the qubit formula) and pure blocks of
    dimensions 2 and 3 (parts from the pure formula).  The solver computes
    the whole.
    """
    options = options or SolverOptions()
    rep = SuiteReport()
    fams = {"identity p1=1": (0.0, None), "qubit blocks": (0.0, None), "pure blocks 2+3": (0.0, None)}
    for t in range(trials):
        rng = substream(seed, 0xB10C, t)
        p1 = float(rng.uniform(0.05, 0.95))
        r1 = _qubit_state(rng)
        whole = mod_trace_distance(block_direct_sum(1.0, r1, 0.0, np.ones((1, 1))), options).value
        viol = abs(whole - qubit_mod_trace(r1))
        if viol >= fams["identity p1=1"][0]:
            fams["identity p1=1"] = (viol, {"p1": 1.0, "rho1": r1})
        r2 = _qubit_state(rng)
        whole = mod_trace_distance(block_direct_sum(p1, r1, 1 - p1, r2), options).value
        viol = abs(whole - p1 * qubit_mod_trace(r1) - (1 - p1) * qubit_mod_trace(r2))
        if viol >= fams["qubit blocks"][0]:
            fams["qubit blocks"] = (viol, {"p1": p1, "rho1": r1, "rho2": r2})
        x1, x2 = haar_pure(2, rng), haar_pure(3, rng)
        s1, s2 = np.outer(x1, x1.conj()), np.outer(x2, x2.conj())
        whole = mod_trace_distance(block_direct_sum(p1, s1, 1 - p1, s2), options).value
        viol = abs(whole - p1 * pure_mod_trace(x1) - (1 - p1) * pure_mod_trace(x2))
        if viol >= fams["pure blocks 2+3"][0]:
            fams["pure blocks 2+3"] = (viol, {"p1": p1, "rho1": s1, "rho2": s2})
    for name, (viol, worst) in fams.items():
        rep.add(f"block additivity: {name}", viol, tol, worst)
    return rep


def proper_measure_suite(trials, seed=42, options=None, zero_tol=1e-8, convexity_tol=1e-5, n=4):
    """Faithfulness (C' = 0 iff incoherent) and convexity under mixing.

    Faithfulness is checked in both directions: random diagonal states must
    give at most ``zero_tol``, and random coherent states must have a
    certified lower bound above ``zero_tol``.  Convexity uses random 3-fold
    mixtures of rank-mixed states in dimension ``n``.
    """
    options = options or SolverOptions()
    rep = SuiteReport()
    worst_zero, worst_zero_in = 0.0, None
    worst_pos, worst_pos_in = -np.inf, None
    worst_cvx, worst_cvx_in = -np.inf, None
    for t in range(trials):
        rng = substream(seed, 0xC0DE, t)
        diag = np.diag(rng.dirichlet(np.ones(n))).astype(complex)
        v = mod_trace_distance(diag, options).value
        if v >= worst_zero:
            worst_zero, worst_zero_in = v, {"rho": diag}
        rho = random_density(n, int(rng.integers(1, n + 1)), rng)
        res = mod_trace_distance(rho, options)
        coherent = not is_incoherent(rho, 1e-10)
        # residual is positive when the coherent state is not certified above zero_tol
        shortfall = zero_tol - res.best_lower_bound if coherent else -np.inf
        if shortfall >= worst_pos:
            worst_pos, worst_pos_in = shortfall, {"rho": rho}
        ps = rng.dirichlet(np.ones(3))
        parts = [random_density(n, int(rng.integers(1, n + 1)), rng) for _ in range(3)]
        mix = sum(p * r for p, r in zip(ps, parts))
        lhs = mod_trace_distance(mix, options).value
        rhs = sum(p * mod_trace_distance(r, options).value for p, r in zip(ps, parts))
        if lhs - rhs >= worst_cvx:
            worst_cvx, worst_cvx_in = lhs - rhs, {"weights": ps, "states": parts}
    rep.add("faithfulness: incoherent -> 0", worst_zero, zero_tol, worst_zero_in)
    rep.add("faithfulness: coherent -> > 0", max(worst_pos, 0.0), 0.0, worst_pos_in)
    rep.add("convexity under mixing", max(worst_cvx, 0.0), convexity_tol, worst_cvx_in)
    return rep


def gradient_suite(points, seed=42, eps=1e-6, tol=1e-5, n_range=(2, 8), min_gap=1e-3):
    """Compare :func:`subgradient_step` with central differences at non-degenerate points.

    Points whose residual ``rho - diag(d)`` has an eigenvalue within
    ``min_gap`` of zero (where the norm is not differentiable) are redrawn.
    """
    rep = SuiteReport()
    worst, worst_in = 0.0, None
    t = 0
    done = 0
    while done < points:
        rng = substream(seed, 0x6AD, t)
        t += 1
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        rho = random_density(n, int(rng.integers(1, n + 1)), rng)
        d = rng.uniform(0.01, 2.0 / n, n)
        if np.abs(np.linalg.eigvalsh(rho - np.diag(d))).min() < min_gap:
            continue
        _, g = subgradient_step(rho, d)
        fd = np.empty(n)
        for i in range(n):
            e = np.zeros(n)
            e[i] = eps
            fp = subgradient_step(rho, d + e)[0]
            fm = subgradient_step(rho, d - e)[0]
            fd[i] = (fp - fm) / (2 * eps)
        err = float(np.abs(fd - g).max())
        if err >= worst:
            worst, worst_in = err, {"rho": rho, "d": d}
        done += 1
    rep.add("subgradient vs central differences", worst, tol, worst_in)
    return rep
