"""Verification suites comparing the solver, the closed forms and the dual
certificates on random states."""

from dataclasses import dataclass, field

import numpy as np

from .closed_forms import (CERT_TOL, certificate_residuals, dual_certificate_pure, l1_coherence,
                           pure_mod_trace, pure_optimal_witness, qubit_mod_trace,
                           qubit_mu_interval, qubit_optimal_set, verify_dual)
from .linalg import trace_norm
from .solver import SolverOptions, mod_trace_distance
from .states import SQRT_HALF, canonicalize, haar_pure, random_density, substream

@dataclass
class SuiteReport:
    """Named checks, each with its worst residual, threshold and offending input."""

    checks: list = field(default_factory=list)

    def add(self, name, residual, threshold, worst_input=None):
        self.checks.append({"name": name, "residual": float(residual), "threshold": threshold,
                            "passed": bool(residual <= threshold), "worst_input": worst_input})

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c["name"] == name:
                return c
        raise KeyError(name)


def _track(store, key, value, payload):
    if key not in store or value >= store[key][0]:
        store[key] = (value, payload)


def qubit_suite(samples=500, seed=42, options=None):
    """Solver against ``2 |rho_12|`` on random full-rank qubit states.

    Also checks that the l1 coherence coincides with the qubit formula and
    that ten random members of the optimal family each attain it.
    """
    options = options or SolverOptions()
    worst = {}
    for i in range(samples):
        rng = substream(seed, 2, 2, i)
        rho = random_density(2, 2, rng)
        exact = qubit_mod_trace(rho)
        res = mod_trace_distance(rho, options)
        _track(worst, "solver", abs(res.value - exact), {"rho": rho})
        _track(worst, "l1", abs(l1_coherence(rho) - exact), {"rho": rho})
        lo, hi = qubit_mu_interval(rho)
        for mu in rng.uniform(lo, hi, 10):
            wit = qubit_optimal_set(rho, mu)
            _track(worst, "family", abs(trace_norm(wit.residual(rho)) - exact), {"rho": rho, "mu": mu})
    rep = SuiteReport()
    rep.add("qubit: |solver - 2|rho_12||", worst["solver"][0], 1e-6, worst["solver"][1])
    rep.add("qubit: l1 coherence = 2|rho_12|", worst["l1"][0], 1e-12, worst["l1"][1])
    rep.add("qubit: optimal family residual", worst["family"][0], 1e-10, worst["family"][1])
    return rep


def _pure_corpus(dims, samples, seed):
    for n in dims:
        for i in range(samples):
            yield haar_pure(n, substream(seed, n, 1, i))


def pure_formula_suite(dims=range(2, 13), samples=100, seed=42, options=None):
    """Solver and optimal witness against the pure-state closed form.

    The solver runs without the closed-form witness as a starting point, so
    agreement is not built in.
    """
    options = options or SolverOptions(witness_start=False)
    worst = {}
    for x in _pure_corpus(dims, samples, seed):
        rho = np.outer(x, x.conj())
        exact = pure_mod_trace(x)
        res = mod_trace_distance(rho, options)
        _track(worst, "solver", abs(res.value - exact), {"state": x})
        wit = pure_optimal_witness(x)
        _track(worst, "witness", abs(trace_norm(wit.residual(rho)) - exact), {"state": x})
        saturated = np.abs(x).max() <= SQRT_HALF
        _track(worst, "threshold", float(saturated != (exact == 1.0)), {"state": x})
    rep = SuiteReport()
    rep.add("pure: |solver - closed form|", worst["solver"][0], 1e-5, worst["solver"][1])
    rep.add("pure: witness residual", worst["witness"][0], 1e-10, worst["witness"][1])
    rep.add("pure: C' = 1 iff max|x_j| <= 1/sqrt(2)", worst["threshold"][0], 0.0, worst["threshold"][1])
    return rep


def duality_suite(dims=range(2, 13), samples=100, seed=42, options=None):
    """Feasibility of the constructed certificates and the primal-dual gap.

    The gap is measured between the optimal witness value and the dual
    objective; the solver value must fall between them.
    """
    options = options or SolverOptions(witness_start=False)
    worst = {}
    for x in _pure_corpus(dims, samples, seed):
        c = canonicalize(x)
        rho = np.outer(x, x.conj())
        rho_c = np.outer(c, c.conj())
        cert = dual_certificate_pure(c)
        feas = max(max(certificate_residuals(cert).values()), 0.0)
        _track(worst, "feasibility", feas, {"state": x})
        if cert.phases is not None:
            w = np.abs(c) ** 2
            closure = abs(np.sum(np.exp(1j * cert.phases) * w / w.sum()))
            _track(worst, "closure", closure, {"state": x})
        dual = verify_dual(cert, rho_c, tol=CERT_TOL)
        primal = trace_norm(pure_optimal_witness(c).residual(rho_c))
        _track(worst, "gap", abs(primal - dual), {"state": x})
        solver = mod_trace_distance(rho, options).value
        sandwich = max(dual - solver, solver - primal, 0.0)
        _track(worst, "sandwich", sandwich, {"state": x})
    rep = SuiteReport()
    rep.add("duality: certificate feasibility residual", worst["feasibility"][0], 1e-10, worst["feasibility"][1])
    if "closure" in worst:
        rep.add("duality: phase closure residual", worst["closure"][0], 1e-10, worst["closure"][1])
    rep.add("duality: primal-dual gap", worst["gap"][0], 1e-6, worst["gap"][1])
    rep.add("duality: dual <= solver <= primal", worst["sandwich"][0], 1e-6, worst["sandwich"][1])
    return rep
