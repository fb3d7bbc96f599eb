"""Dataset loading, preprocessing, splitting and synthetic generators."""
import csv
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, OneToOneFeatureMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import ConfigError, DataError
from .numeric import make_rng


@dataclass
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: list = None

    def __post_init__(self):
        if self.features.shape[0] != self.labels.shape[0]:
            raise DataError(
                f"{self.features.shape[0]} feature rows but {self.labels.shape[0]} labels"
            )

    def __len__(self):
        return self.features.shape[0]

    def subset(self, idx):
        return Dataset(self.features[idx], self.labels[idx], self.feature_names)


def load_csv(path, label_column=-1, has_header=False, missing_token="?", task="classification"):
    """Read a comma-separated file.  Missing tokens become NaN (imputed later
    by :class:`MinMaxMedianScaler`).  ``label_column`` is an index or, when
    the file has a header, a column name.  Classification labels are parsed
    as integers, regression targets as floats."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]
    header = None
    if has_header:
        if not rows:
            raise DataError(f"{path}: empty file")
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0])
    if isinstance(label_column, str):
        if header is None or label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not found")
        label_idx = header.index(label_column)
    else:
        label_idx = int(label_column) % width if -width <= int(label_column) < width else None
        if label_idx is None:
            raise DataError(f"{path}: label column {label_column} out of range for {width} columns")
    first_line = 2 if has_header else 1
    feats = np.empty((len(rows), width - 1))
    labels = []
    for r, row in enumerate(rows):
        line = r + first_line
        if len(row) != width:
            raise DataError(f"{path}: line {line} has {len(row)} fields, expected {width}")
        values = []
        for c, cell in enumerate(row):
            cell = cell.strip()
            if c == label_idx:
                if cell == missing_token:
                    raise DataError(f"{path}: line {line} has a missing label")
                try:
                    labels.append(int(cell) if task == "classification" else float(cell))
                except ValueError:
                    try:
                        as_float = float(cell)
                    except ValueError:
                        raise DataError(f"{path}: line {line}: cannot parse label {cell!r}") from None
                    if task == "classification" and as_float.is_integer():
                        labels.append(int(as_float))
                    else:
                        raise DataError(f"{path}: line {line}: cannot parse label {cell!r}") from None
                continue
            if cell == missing_token or cell == "":
                values.append(np.nan)
                continue
            try:
                values.append(float(cell))
            except ValueError:
                raise DataError(f"{path}: line {line}, column {c + 1}: cannot parse {cell!r}") from None
        feats[r] = values
    names = None
    if header is not None:
        names = [h for i, h in enumerate(header) if i != label_idx]
    dtype = np.int64 if task == "classification" else np.float64
    return Dataset(feats, np.asarray(labels, dtype=dtype), names)


class MinMaxMedianScaler(OneToOneFeatureMixin, TransformerMixin, BaseEstimator):
    """Impute missing values with training medians, then map every feature
    linearly onto [-1, 1] using the training min and max.

    Constant features map to 0.  Values outside the training range are not
    clipped.
    """

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64, ensure_all_finite="allow-nan")
        self.n_features_in_ = X.shape[1]
        with np.errstate(all="ignore"):
            med = np.nanmedian(X, axis=0)
        self.median_ = np.where(np.isnan(med), 0.0, med)
        filled = np.where(np.isnan(X), self.median_, X)
        self.data_min_ = filled.min(axis=0)
        self.data_max_ = filled.max(axis=0)
        return self

    def transform(self, X):
        check_is_fitted(self, "median_")
        X = check_array(X, dtype=np.float64, ensure_all_finite="allow-nan", copy=True)
        if X.shape[1] != self.n_features_in_:
            raise DataError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        X = np.where(np.isnan(X), self.median_, X)
        span = self.data_max_ - self.data_min_
        constant = span == 0
        scaled = 2.0 * (X - self.data_min_) / np.where(constant, 1.0, span) - 1.0
        scaled[:, constant] = 0.0
        return scaled

    def to_dict(self):
        check_is_fitted(self, "median_")
        return {"median": self.median_.tolist(), "min": self.data_min_.tolist(), "max": self.data_max_.tolist()}

    @classmethod
    def from_dict(cls, doc):
        obj = cls()
        obj.median_ = np.asarray(doc["median"], dtype=np.float64)
        obj.data_min_ = np.asarray(doc["min"], dtype=np.float64)
        obj.data_max_ = np.asarray(doc["max"], dtype=np.float64)
        obj.n_features_in_ = obj.median_.shape[0]
        return obj


def split(ds, fractions=(0.15, 0.15), seed=0):
    """Seeded permutation split into ``(train, validation, test)``.

    ``fractions`` gives the validation and test shares; the rest is train.
    """
    val_frac, test_frac = fractions
    if val_frac < 0 or test_frac < 0 or val_frac + test_frac >= 1:
        raise ConfigError(f"invalid split fractions {fractions}")
    n = len(ds)
    n_val = int(round(val_frac * n))
    n_test = int(round(test_frac * n))
    n_train = n - n_val - n_test
    if min(n_train, n_val, n_test) <= 0:
        raise ConfigError(f"split {fractions} of {n} rows leaves an empty part")
    perm = make_rng(seed).permutation(n)
    return (
        ds.subset(np.sort(perm[:n_train])),
        ds.subset(np.sort(perm[n_train:n_train + n_val])),
        ds.subset(np.sort(perm[n_train + n_val:])),
    )


SYNTH_KINDS = ("two_gaussians", "two_moons_like", "sine_regression")


def synth(kind, n=1000, noise=0.1, seed=0):
    """Small seeded datasets.

    ``two_gaussians``: classes centred at (-2, -2) and (2, 2) with isotropic
    standard deviation ``noise``.  ``two_moons_like``: the upper half circle
    (cos t, sin t) and the lower one (1 - cos t, 0.5 - sin t), t ~ U(0, pi),
    plus Gaussian noise.  ``sine_regression``: x ~ U(-1, 1), y = sin(2 pi x)
    plus Gaussian noise.
    """
    if n < 10:
        raise ConfigError("synthetic datasets need n >= 10")
    if kind not in SYNTH_KINDS:
        raise ConfigError(f"unknown synthetic dataset {kind!r}; expected one of {SYNTH_KINDS}")
    rng = make_rng(seed)
    if kind == "sine_regression":
        x = rng.uniform(-1.0, 1.0, size=(n, 1))
        y = np.sin(2.0 * np.pi * x[:, 0]) + noise * rng.standard_normal(n)
        return Dataset(x, y)
    labels = np.arange(n) % 2
    if kind == "two_gaussians":
        centers = np.where(labels[:, None] == 0, -2.0, 2.0) * np.ones((n, 2))
        return Dataset(centers + noise * rng.standard_normal((n, 2)), labels.astype(np.int64))
    t = rng.uniform(0.0, np.pi, size=n)
    upper = np.stack([np.cos(t), np.sin(t)], axis=1)
    lower = np.stack([1.0 - np.cos(t), 0.5 - np.sin(t)], axis=1)
    x = np.where(labels[:, None] == 0, upper, lower) + noise * rng.standard_normal((n, 2))
    return Dataset(x, labels.astype(np.int64))
