import numpy as np
from sklearn.base import clone
from sklearn.model_selection import cross_val_score
from sklearn.pipeline import make_pipeline

from kafnets import KafNetClassifier, KafNetRegressor, MinMaxMedianScaler
from kafnets.data import synth


def test_params_round_trip():
    est = KafNetClassifier(hidden_layer_sizes=(5,), C=0.0, max_epochs=3)
    params = est.get_params()
    assert params["hidden_layer_sizes"] == (5,) and params["max_epochs"] == 3
    assert clone(est).get_params() == params
    est.set_params(activation="tanh")
    assert est.activation == "tanh"


def test_binary_classifier_pipeline():
    ds = synth("two_moons_like", n=600, noise=0.1, seed=1)
    X = ds.features * 10 + 3  # the scaler undoes this
    pipe = make_pipeline(MinMaxMedianScaler(), KafNetClassifier(hidden_layer_sizes=(20,), C=0.0, max_epochs=100))
    pipe.fit(X[:500], ds.labels[:500])
    assert pipe.score(X[500:], ds.labels[500:]) >= 0.9
    proba = pipe.predict_proba(X[500:])
    np.testing.assert_allclose(proba.sum(axis=1), 1.0)
    clf = pipe[-1]
    assert clf.network_.n_outputs == 1 and clf.count_parameters()["total"] == 2 * 20 + 20 + 20 * 20 + 21


def test_multiclass_labels():
    rng = np.random.default_rng(0)
    y = np.repeat(["a", "b", "c"], 60)
    X = rng.normal(size=(180, 2)) * 0.3 + np.repeat([[0, 1], [1, 0], [-1, -1]], 60, axis=0)
    clf = KafNetClassifier(hidden_layer_sizes=(8,), activation="relu", max_epochs=60, learning_rate=0.01).fit(X, y)
    assert set(clf.predict(X)) <= {"a", "b", "c"}
    assert clf.score(X, y) > 0.9
    assert clf.predict_proba(X).shape == (180, 3)


def test_regressor():
    ds = synth("sine_regression", n=400, noise=0.0, seed=0)
    reg = KafNetRegressor(hidden_layer_sizes=(20,), C=0.0, learning_rate=0.01, max_epochs=150)
    reg.fit(ds.features, ds.labels)
    assert reg.score(ds.features, ds.labels) > 0.9


def test_cross_val_and_determinism():
    ds = synth("two_gaussians", n=200, noise=1.0, seed=0)
    est = KafNetClassifier(hidden_layer_sizes=(4,), max_epochs=5)
    a = cross_val_score(est, ds.features, ds.labels, cv=2)
    b = cross_val_score(clone(est), ds.features, ds.labels, cv=2)
    np.testing.assert_array_equal(a, b)


def test_explicit_validation_data():
    ds = synth("two_gaussians", n=200, noise=1.0, seed=0)
    clf = KafNetClassifier(hidden_layer_sizes=(4,), max_epochs=3).fit(
        ds.features[:150], ds.labels[:150], validation_data=(ds.features[150:], ds.labels[150:]))
    assert len(clf.history_) == clf.n_epochs_ <= 3
