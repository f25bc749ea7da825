"""scikit-learn compatible wrappers.

:class:`CoherenceMeasure` maps a batch of states to one coherence value per
state, so it can sit inside a ``Pipeline`` or be tuned with ``GridSearchCV``
like any other transformer.  ``predict`` reports whether the modified trace
distance is saturated (equal to 1).
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .closed_forms import l1_coherence, pure_mod_trace, qubit_mod_trace
from .solver import SolverOptions, mod_trace_distance, trace_distance_coherence
from .validation import ValidationError, check_states

MEASURES = ("l1", "tr", "mod-tr")
METHODS = ("closed-form", "solver", "auto")


def pure_vector(rho, tol=1e-12):
    """Unit vector ``x`` with ``rho = |x><x|``, or None if ``rho`` is not pure."""
    w, U = np.linalg.eigh(rho)
    if w[-1] < 1 - tol:
        return None
    return U[:, -1] / np.linalg.norm(U[:, -1])


def closed_form_value(rho, measure):
    """Closed-form value, or None when no formula covers this input."""
    if measure == "l1":
        return l1_coherence(rho)
    if rho.shape == (2, 2):
        # on qubits both trace-distance measures equal 2|rho_12|
        return qubit_mod_trace(rho)
    if measure == "mod-tr":
        x = pure_vector(rho)
        if x is not None:
            return pure_mod_trace(x)
    return None


class CoherenceMeasure(TransformerMixin, BaseEstimator):
    """Coherence of quantum states as a scikit-learn transformer.

    Parameters
    ----------
    measure : {"mod-tr", "tr", "l1"}
        Modified trace distance, standard trace distance or l1 coherence.
    method : {"auto", "closed-form", "solver"}
        ``auto`` uses a closed form where one exists and the solver
        otherwise; ``closed-form`` raises on inputs without one.
    target_accuracy : float
        Certified accuracy requested from the solver.
    max_iterations : int
    classification_tol : float
        ``predict`` returns True when the value is at least
        ``1 - classification_tol``.
    """

    def __init__(self, measure="mod-tr", method="auto", target_accuracy=1e-7,
                 max_iterations=5000, classification_tol=1e-6):
        self.measure = measure
        self.method = method
        self.target_accuracy = target_accuracy
        self.max_iterations = max_iterations
        self.classification_tol = classification_tol

    def _check_params(self):
        if self.measure not in MEASURES:
            raise ValidationError(f"measure must be one of {MEASURES}, got {self.measure!r}")
        if self.method not in METHODS:
            raise ValidationError(f"method must be one of {METHODS}, got {self.method!r}")

    def fit(self, X, y=None):
        """Validate the states and record their dimension; the measure has no trainable state."""
        self._check_params()
        states = check_states(X)
        self.dims_ = sorted({s.shape[0] for s in states})
        return self

    def _value(self, rho, options):
        if self.method != "solver":
            val = closed_form_value(rho, self.measure)
            if val is not None:
                return val
            if self.method == "closed-form":
                raise ValidationError(
                    f"no closed form for measure {self.measure!r} on this {rho.shape[0]}-dimensional state")
        if self.measure == "l1":
            return l1_coherence(rho)
        solve = mod_trace_distance if self.measure == "mod-tr" else trace_distance_coherence
        return solve(rho, options).value

    def transform(self, X):
        """Return an ``(n_states, 1)`` array of coherence values."""
        check_is_fitted(self, "dims_")
        self._check_params()
        options = SolverOptions(target_accuracy=self.target_accuracy, max_iterations=self.max_iterations)
        vals = [self._value(rho, options) for rho in check_states(X)]
        return np.asarray(vals, dtype=float).reshape(-1, 1)

    def predict(self, X):
        """Boolean array: is the value within ``classification_tol`` of 1."""
        return self.transform(X).ravel() >= 1 - self.classification_tol
