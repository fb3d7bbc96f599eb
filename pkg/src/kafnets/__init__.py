"""Kernel activation functions and other adaptive activations for
feedforward networks, with a numpy backend and scikit-learn estimators."""
from .data import Dataset, MinMaxMedianScaler, load_csv, split, synth
from .estimators import KafNetClassifier, KafNetRegressor
from .exceptions import ConfigError, DataError, KafnetsError, NumericError, ShapeMismatchError
from .kaf import KAF, KAF2D, build_dictionary, kaf_backward, kaf_forward, kernel_eval, krr_init
from .network import Network, build_layers, count_parameters, load_model, save_model
from .training import Adam, EarlyStopping, metric_accuracy, metric_auc, train

__version__ = "0.1.0"

__all__ = [
    "Adam", "ConfigError", "DataError", "Dataset", "EarlyStopping", "KAF", "KAF2D", "KafNetClassifier",
    "KafNetRegressor", "KafnetsError", "MinMaxMedianScaler", "Network", "NumericError", "ShapeMismatchError",
    "build_dictionary", "build_layers", "count_parameters", "kaf_backward", "kaf_forward", "kernel_eval",
    "krr_init", "load_csv", "load_model", "metric_accuracy", "metric_auc", "save_model", "split", "synth",
    "train",
]
