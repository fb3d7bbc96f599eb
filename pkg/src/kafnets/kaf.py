"""Kernel activation functions.

A KAF neuron computes ``g(s) = sum_i alpha_i k(s, d_i)`` over a fixed,
equispaced dictionary ``d``; only the mixing coefficients ``alpha`` are
trained.  The 2-D variant acts on pairs of consecutive activations and
expands over a ``D x D`` grid on the plane.
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .activations.fixed import DEFAULTS as FIXED_DEFAULTS
from .activations.fixed import eval_fixed
from .exceptions import ConfigError, NumericError
from .layers import ElementwiseActivation, Layer
from .numeric import make_rng

KAF_INIT_VARIANCE = 0.3
KRR_EPSILON = 1e-6


def bandwidth_rule(spacing):
    """Gaussian bandwidth 1 / (6 spacing^2) for a grid with the given step."""
    return 1.0 / (6.0 * spacing * spacing)


@dataclass(frozen=True)
class KafDictionary:
    points: np.ndarray
    spacing: float
    gamma: float
    lo: float
    hi: float

    @property
    def size(self):
        return self.points.shape[0]


def build_dictionary(D=20, lo=-3.0, hi=3.0, gamma=None):
    if D < 2:
        raise ValueError(f"a dictionary needs at least 2 elements, got D={D}")
    if not lo < hi:
        raise ValueError(f"empty dictionary range [{lo}, {hi}]")
    spacing = (hi - lo) / (D - 1)
    points = lo + np.arange(D) * spacing
    if gamma is None:
        # 1 / (6 spacing^2) written without the rounded spacing
        gamma = (D - 1) ** 2 / (6.0 * (hi - lo) ** 2)
    return KafDictionary(points, spacing, float(gamma), float(lo), float(hi))


def gaussian_kernel(s, d, gamma):
    s, d = np.asarray(s, dtype=np.float64), np.asarray(d, dtype=np.float64)
    return np.exp(-gamma * (s - d) ** 2)


def polynomial_kernel(s, d, p):
    s, d = np.asarray(s, dtype=np.float64), np.asarray(d, dtype=np.float64)
    return (1.0 + s * d) ** p


def kernel_eval(kind, s, d, gamma=1.0, p=2):
    """Evaluate the 1-D ``"gaussian"`` or ``"polynomial"`` kernel."""
    if kind == "gaussian":
        if gamma <= 0:
            raise ValueError("gaussian kernel needs gamma > 0")
        out = gaussian_kernel(s, d, gamma)
    elif kind == "polynomial":
        if p < 1 or int(p) != p:
            raise ValueError("polynomial kernel needs a natural degree p >= 1")
        out = polynomial_kernel(s, d, p)
    else:
        raise ValueError(f"unknown kernel {kind!r}")
    return out[()] if np.ndim(out) == 0 else out


def kernel_matrix(kind, x, d, gamma=1.0, p=2):
    x = np.asarray(x, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    return kernel_eval(kind, x[:, None], d[None, :], gamma=gamma, p=p)


def _kernel_and_slope(kind, s, d, gamma, p):
    """Kernel values against every dictionary element and their s-derivative.

    ``s`` of any shape, result has shape ``s.shape + (D,)``.
    """
    diff = s[..., None] - d
    if kind == "gaussian":
        k = np.exp(-gamma * diff * diff)
        return k, -2.0 * gamma * diff * k
    base = 1.0 + s[..., None] * d
    return base**p, p * d * base ** (p - 1)


def kaf_forward(s, alpha, dictionary, kernel="gaussian", p=2):
    """Evaluate KAF neurons.

    ``alpha`` is (D,) for one neuron or (N, D) for a layer; ``s`` broadcasts
    against ``alpha.shape[:-1]``.  The batch kernel matrix is formed once and
    contracted with ``alpha``.
    """
    s = np.asarray(s, dtype=np.float64)
    k, _ = _kernel_and_slope(kernel, s, dictionary.points, dictionary.gamma, p)
    out = np.einsum("...d,...d->...", k, np.asarray(alpha, dtype=np.float64))
    return out[()] if np.ndim(out) == 0 else out


def kaf_backward(s, alpha, dictionary, kernel="gaussian", p=2):
    """Return ``(dg/ds, dg/dalpha)``; dg/dalpha_i is simply k(s, d_i)."""
    s = np.asarray(s, dtype=np.float64)
    k, dk = _kernel_and_slope(kernel, s, dictionary.points, dictionary.gamma, p)
    ds = np.einsum("...d,...d->...", dk, np.asarray(alpha, dtype=np.float64))
    return (ds[()] if np.ndim(ds) == 0 else ds), k


def krr_init(dictionary, targets, epsilon=KRR_EPSILON, kernel="gaussian", p=2):
    """Mixing coefficients ``(K + eps I)^-1 t`` so that the KAF matches the
    targets at the dictionary points."""
    t = np.asarray(targets, dtype=np.float64)
    if epsilon <= 0:
        raise ValueError("krr_init needs epsilon > 0")
    if not np.all(np.isfinite(t)):
        raise NumericError("krr_init: targets contain non-finite values")
    K = kernel_matrix(kernel, dictionary.points, dictionary.points, gamma=dictionary.gamma, p=p)
    A = K + epsilon * np.eye(K.shape[0])
    try:
        alpha = linalg.solve(A, t, assume_a="pos")
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"krr_init: kernel system could not be solved ({exc})") from exc
    if not np.all(np.isfinite(alpha)):
        raise NumericError("krr_init: solution is not finite")
    return alpha


def krr_fit(dictionary, s, targets, epsilon=KRR_EPSILON, kernel="gaussian", p=2):
    """Ridge fit of mixing coefficients to samples ``(s, targets)`` taken
    anywhere on the line: ``(K^T K + eps I)^-1 K^T t`` with K the
    samples-by-dictionary kernel matrix."""
    K = kernel_matrix(kernel, s, dictionary.points, gamma=dictionary.gamma, p=p)
    t = np.asarray(targets, dtype=np.float64)
    return linalg.solve(K.T @ K + epsilon * np.eye(K.shape[1]), K.T @ t, assume_a="pos")


def kaf_random_init(rng, D, n_units=None):
    """Mixing coefficients drawn from N(0, 0.3) (variance 0.3)."""
    rng = make_rng(rng)
    shape = (D,) if n_units is None else (n_units, D)
    return rng.normal(0.0, np.sqrt(KAF_INIT_VARIANCE), size=shape)


def parse_init(init):
    """``"random"`` or ``"krr:<fixed activation name>"``."""
    if init == "random":
        return None
    if isinstance(init, str) and init.startswith("krr:"):
        target = init[4:]
        if target not in FIXED_DEFAULTS:
            raise ConfigError(f"krr init target must be a fixed activation, got {target!r}")
        return target
    raise ConfigError(f"KAF init must be 'random' or 'krr:<activation>', got {init!r}")


class KAF(ElementwiseActivation):
    """Layer of KAF neurons sharing one fixed dictionary.

    Trainable weights: ``D`` mixing coefficients per neuron.  The dictionary
    and bandwidth never change during training.
    """

    family = "kaf"
    name = "kaf"

    def __init__(self, n_units, D=20, lo=-3.0, hi=3.0, kernel="gaussian", p=2, init="random", rng=None):
        if kernel not in ("gaussian", "polynomial"):
            raise ConfigError(f"unknown kernel {kernel!r}")
        target = parse_init(init)
        super().__init__(n_units)
        self.dictionary = build_dictionary(D, lo, hi)
        self.kernel, self.p, self.init = kernel, int(p), init
        if target is None:
            alpha = kaf_random_init(make_rng(rng), D, n_units)
        else:
            t = eval_fixed(target, self.dictionary.points)
            alpha = np.tile(krr_init(self.dictionary, t, kernel=kernel, p=self.p), (n_units, 1))
        self.add_param("alpha", alpha)
        self.initial_alpha = alpha.copy()

    def _value(self, s):
        return kaf_forward(s, self.params["alpha"], self.dictionary, self.kernel, self.p)

    def _derivatives(self, s):
        ds, k = kaf_backward(s, self.params["alpha"], self.dictionary, self.kernel, self.p)
        return ds, {"alpha": k}

    def hyperparameters(self):
        d = self.dictionary
        cfg = {"D": d.size, "lo": d.lo, "hi": d.hi, "kernel": self.kernel, "init": self.init}
        if self.kernel == "polynomial":
            cfg["p"] = self.p
        return cfg


# ---------------------------------------------------------------- 2-D ----

def build_dictionary_2d(D=8, lo=-3.0, hi=3.0):
    """Row-major ``D x D`` grid on the plane with the 1-D bandwidth scaled by
    sqrt(2).  Returns ``(points (D*D, 2), gamma, dictionary_1d)``."""
    d1 = build_dictionary(D, lo, hi)
    xx, yy = np.meshgrid(d1.points, d1.points, indexing="ij")
    points = np.stack([xx.ravel(), yy.ravel()], axis=1)
    return points, np.sqrt(2.0) * d1.gamma, d1


def kaf2d_forward(s, alpha, points, gamma):
    """Evaluate 2-D KAFs; ``s`` has a trailing axis of size 2."""
    s = np.asarray(s, dtype=np.float64)
    diff = s[..., None, :] - points
    k = np.exp(-gamma * (diff * diff).sum(axis=-1))
    out = np.einsum("...d,...d->...", k, np.asarray(alpha, dtype=np.float64))
    return out[()] if np.ndim(out) == 0 else out


def kaf2d_backward(s, alpha, points, gamma):
    """Return ``(dg/ds with trailing axis 2, dg/dalpha)``."""
    s = np.asarray(s, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    diff = s[..., None, :] - points
    k = np.exp(-gamma * (diff * diff).sum(axis=-1))
    ds = -2.0 * gamma * np.einsum("...d,...dj->...j", k * alpha, diff)
    return ds, k


class KAF2D(Layer):
    """2-D KAF layer: consecutive activations (0, 1), (2, 3), ... are paired,
    so the output width is half the input width."""

    family = "kaf"
    name = "kaf2d"

    def __init__(self, n_in, D=8, lo=-3.0, hi=3.0, init="random", rng=None):
        if n_in % 2:
            raise ConfigError(f"kaf2d needs an even number of inputs, got {n_in}")
        target = parse_init(init)
        super().__init__(n_in, n_in // 2)
        self.points, self.gamma, self.dictionary = build_dictionary_2d(D, lo, hi)
        self.D, self.init = int(D), init
        if target is None:
            alpha = kaf_random_init(make_rng(rng), D * D, self.n_out)
        else:
            # fit g(s1, s2) = f(s1) + f(s2) as a separable starting shape
            t = eval_fixed(target, self.points).sum(axis=1)
            K = np.exp(-self.gamma * ((self.points[:, None] - self.points[None]) ** 2).sum(-1))
            coef = linalg.solve(K + KRR_EPSILON * np.eye(len(t)), t, assume_a="pos")
            alpha = np.tile(coef, (self.n_out, 1))
        self.add_param("alpha", alpha)
        self.initial_alpha = alpha.copy()
        self._pairs = None

    def forward(self, x, training=False):
        self._pairs = x.reshape(x.shape[0], self.n_out, 2)
        return kaf2d_forward(self._pairs, self.params["alpha"], self.points, self.gamma)

    def backward(self, grad):
        ds, k = kaf2d_backward(self._pairs, self.params["alpha"], self.points, self.gamma)
        self.grads["alpha"] = np.einsum("bu,bud->ud", grad, k)
        return (grad[..., None] * ds).reshape(grad.shape[0], self.n_in)

    def get_config(self):
        d = self.dictionary
        return {"type": "activation", "name": "kaf2d", "units": self.n_in, "D": self.D, "lo": d.lo, "hi": d.hi,
                "init": self.init}
