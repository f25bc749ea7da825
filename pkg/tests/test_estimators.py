import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import FunctionTransformer

from modcoherence.closed_forms import pure_mod_trace
from modcoherence.estimators import CoherenceMeasure, closed_form_value, pure_vector
from modcoherence.states import haar_pure, maximally_coherent, random_density, substream
from modcoherence.validation import ValidationError, check_states


def test_get_params_and_clone():
    est = CoherenceMeasure(measure="tr", target_accuracy=1e-6)
    params = est.get_params()
    assert params["measure"] == "tr" and params["target_accuracy"] == 1e-6
    twin = clone(est)
    assert twin.get_params() == params and twin is not est
    est.set_params(measure="l1")
    assert est.measure == "l1"


def test_transform_requires_fit():
    with pytest.raises(NotFittedError):
        CoherenceMeasure().transform(np.eye(2)[None] / 2)


def test_pure_vectors_batch():
    X = np.array([haar_pure(4, substream(1, i)) for i in range(5)])
    est = CoherenceMeasure().fit(X)
    assert est.dims_ == [4]
    vals = est.transform(X)
    assert vals.shape == (5, 1)
    np.testing.assert_allclose(vals.ravel(), [pure_mod_trace(x) for x in X], atol=1e-15)


def test_solver_and_closed_form_agree():
    X = np.array([haar_pure(3, substream(2, i)) for i in range(5)])
    a = CoherenceMeasure(method="closed-form").fit_transform(X)
    b = CoherenceMeasure(method="solver").fit_transform(X)
    np.testing.assert_allclose(a, b, atol=1e-6)


def test_mixed_states_use_solver():
    X = np.array([random_density(3, 2, substream(3, i)) for i in range(3)])
    vals = CoherenceMeasure().fit_transform(X)
    assert np.all((vals >= 0) & (vals <= 1))
    with pytest.raises(ValidationError):
        CoherenceMeasure(method="closed-form").fit_transform(X)


def test_measures_are_ordered():
    X = [maximally_coherent(3)]
    l1 = CoherenceMeasure(measure="l1").fit_transform(X)[0, 0]
    tr = CoherenceMeasure(measure="tr").fit_transform(X)[0, 0]
    mod = CoherenceMeasure(measure="mod-tr").fit_transform(X)[0, 0]
    assert l1 == pytest.approx(2)
    assert tr == pytest.approx(4 / 3, abs=1e-6)
    assert mod == pytest.approx(1)


def test_predict_saturation():
    X = [np.ones(3) / np.sqrt(3), np.array([0.9, np.sqrt(0.19), 0])]
    np.testing.assert_array_equal(CoherenceMeasure().fit(X).predict(X), [True, False])


def test_mixed_dimensions():
    X = [np.ones(2) / np.sqrt(2), np.eye(3) / 3]
    est = CoherenceMeasure().fit(X)
    assert est.dims_ == [2, 3]
    np.testing.assert_allclose(est.transform(X).ravel(), [1, 0], atol=1e-9)


def test_bad_params():
    with pytest.raises(ValidationError):
        CoherenceMeasure(measure="entropy").fit([np.eye(2) / 2])
    with pytest.raises(ValidationError):
        CoherenceMeasure(method="magic").fit([np.eye(2) / 2])


def test_pipeline():
    to_states = FunctionTransformer(lambda X: X / np.linalg.norm(X, axis=1, keepdims=True))
    pipe = Pipeline([("normalize", to_states), ("coherence", CoherenceMeasure())])
    X = np.array([[1.0, 1.0, 0.0], [3.0, 0.0, 0.0]])
    np.testing.assert_allclose(pipe.fit_transform(X).ravel(), [1.0, 0.0], atol=1e-12)


def test_pure_vector_detection():
    x = haar_pure(3, substream(4))
    y = pure_vector(np.outer(x, x.conj()))
    assert abs(abs(np.vdot(x, y)) - 1) < 1e-12
    assert pure_vector(np.eye(3) / 3) is None


def test_closed_form_value_coverage():
    rho = random_density(3, 2, substream(5))
    assert closed_form_value(rho, "mod-tr") is None
    assert closed_form_value(rho, "tr") is None
    assert closed_form_value(rho, "l1") is not None


def test_check_states_shapes():
    x = haar_pure(3, substream(6))
    assert len(check_states(np.array([x, x]))) == 2
    rho = np.eye(3) / 3
    assert len(check_states(rho)) == 1
    assert len(check_states(np.stack([rho, rho]))) == 2
    with pytest.raises(ValidationError):
        check_states([])
