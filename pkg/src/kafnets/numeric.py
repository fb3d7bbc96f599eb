"""Small dense-array helpers on top of numpy.

Every array in the library is a float64 numpy array laid out with one
sample per row.
"""
import numpy as np

from .exceptions import ShapeMismatchError


def make_rng(seed=None):
    """Return a seeded ``numpy.random.Generator`` (PCG64)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def as_matrix(a):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise ShapeMismatchError(f"expected a 2-D array, got shape {a.shape}")
    return a


def matmul(a, b):
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatchError(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    return a @ b


def elementwise(a, f):
    a = as_matrix(a)
    return np.vectorize(f, otypes=[np.float64])(a) if a.size else a.copy()


def rand_normal(rng, rows, cols, mean=0.0, std=1.0):
    if std < 0:
        raise ValueError(f"standard deviation must be non-negative, got {std}")
    rng = make_rng(rng)
    return rng.normal(mean, std, size=(rows, cols)) if std > 0 else np.full((rows, cols), float(mean))


def rand_uniform(rng, rows, cols, low, high):
    return make_rng(rng).uniform(low, high, size=(rows, cols))
