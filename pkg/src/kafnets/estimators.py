"""scikit-learn compatible estimators wrapping :class:`~kafnets.network.Network`."""
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.model_selection import train_test_split
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .network import Network, build_layers, count_parameters
from .training import TrainConfig, train


class _BaseKafNet(BaseEstimator):
    """Shared fit logic.

    The hidden part of the network is either ``architecture`` (a list of
    layer specs, see :func:`kafnets.network.build_layers`) or, when that is
    None, one dense layer per entry of ``hidden_layer_sizes`` followed by
    ``activation``.
    """

    def __init__(
        self,
        hidden_layer_sizes=(20,),
        activation="kaf",
        architecture=None,
        C=1e-4,
        penalty="l2",
        regularization_overrides=None,
        learning_rate=1e-3,
        batch_size=100,
        max_epochs=200,
        patience=15,
        validation_fraction=0.15,
        random_state=0,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.activation = activation
        self.architecture = architecture
        self.C = C
        self.penalty = penalty
        self.regularization_overrides = regularization_overrides
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.patience = patience
        self.validation_fraction = validation_fraction
        self.random_state = random_state

    def _hidden_specs(self):
        if self.architecture is not None:
            return list(self.architecture)
        return [{"type": "dense", "units": int(n), "activation": self.activation} for n in self.hidden_layer_sizes]

    def _build(self, n_inputs, n_outputs, head, loss):
        seed = 0 if self.random_state is None else self.random_state
        layers = build_layers(self._hidden_specs(), n_inputs, n_outputs, head, rng=np.random.default_rng(seed))
        return Network(layers, loss=loss, C=self.C, penalty=self.penalty,
                       overrides=self.regularization_overrides, seed=seed)

    def _fit(self, X, y, validation_data, head, loss, task, stratify):
        if validation_data is None:
            X, X_val, y, y_val = train_test_split(
                X, y, test_size=self.validation_fraction, random_state=self.random_state,
                stratify=stratify,
            )
        else:
            X_val, y_val = validation_data
            X_val = check_array(X_val, dtype=np.float64)
            y_val = self._encode_targets(np.asarray(y_val))
        self.network_ = self._build(X.shape[1], self._n_outputs, head, loss)
        config = TrainConfig(lr=self.learning_rate, batch_size=self.batch_size, max_epochs=self.max_epochs,
                             patience=self.patience, seed=0 if self.random_state is None else self.random_state)
        result = train(self.network_, X, y, X_val, y_val, config, task=task)
        self.history_ = result.history
        self.best_epoch_ = result.best_epoch
        self.n_epochs_ = result.epochs_run
        self.n_features_in_ = X.shape[1]
        return self

    def count_parameters(self):
        check_is_fitted(self, "network_")
        return count_parameters(self.network_)


class KafNetClassifier(ClassifierMixin, _BaseKafNet):
    """Feedforward classifier; binary problems use one sigmoid output with
    log-loss (early stopping on validation AUC), multiclass problems a
    softmax output with cross-entropy (early stopping on accuracy)."""

    def _encode_targets(self, y):
        return np.searchsorted(self.classes_, y)

    def fit(self, X, y, validation_data=None):
        X, y = check_X_y(X, y, dtype=np.float64)
        check_classification_targets(y)
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        binary = len(self.classes_) == 2
        self._n_outputs = 1 if binary else len(self.classes_)
        head, loss = ("sigmoid", "binary_cross_entropy") if binary else ("softmax", "cross_entropy_softmax")
        stratify = y_enc if validation_data is None else None
        return self._fit(X, y_enc, validation_data, head, loss, "classification", stratify)

    def predict_proba(self, X):
        check_is_fitted(self, "network_")
        X = check_array(X, dtype=np.float64)
        out = self.network_.predict(X)
        if out.shape[1] == 1:
            return np.hstack([1.0 - out, out])
        return out

    def decision_function(self, X):
        proba = self.predict_proba(X)
        return proba[:, 1] if proba.shape[1] == 2 else proba

    def predict(self, X):
        return self.classes_[self.predict_proba(X).argmax(axis=1)]


class KafNetRegressor(RegressorMixin, _BaseKafNet):
    """Feedforward regressor with a linear output and squared loss."""

    def _encode_targets(self, y):
        return y.astype(np.float64)

    def fit(self, X, y, validation_data=None):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
        self._n_outputs = 1
        return self._fit(X, y, validation_data, "identity", "squared", "regression", None)

    def predict(self, X):
        check_is_fitted(self, "network_")
        X = check_array(X, dtype=np.float64)
        return self.network_.predict(X)[:, 0]
