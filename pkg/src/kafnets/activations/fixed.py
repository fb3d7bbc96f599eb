"""Fixed (non-trainable) activation functions.

All functions accept scalars or numpy arrays.  Derivatives at the kinks of
ReLU and leaky ReLU take the left-branch value (0 and ``alpha``).
"""
import numpy as np
from scipy.special import expit

from ..exceptions import ConfigError
from ..layers import ElementwiseActivation

SELU_LAMBDA = 1.0507009873554805
SELU_ALPHA = 1.6732632423543772

DEFAULTS = {
    "sigmoid": {},
    "tanh": {},
    "relu": {},
    "softplus": {},
    "leaky_relu": {"alpha": 0.01},
    "elu": {"alpha": 1.0},
    "selu": {"lam": SELU_LAMBDA, "alpha": SELU_ALPHA},
    "swish": {},
    "identity": {},
}


def sigmoid(s):
    return expit(s)


def softplus(s):
    # log(1 + e^s) = max(s, 0) + log1p(e^-|s|), safe for any |s|
    s = np.asarray(s, dtype=np.float64)
    return np.maximum(s, 0.0) + np.log1p(np.exp(-np.abs(s)))


def elu(s, alpha=1.0):
    s = np.asarray(s, dtype=np.float64)
    return np.where(s >= 0, s, alpha * np.expm1(np.minimum(s, 0.0)))


def _elu_grad(s, alpha=1.0):
    s = np.asarray(s, dtype=np.float64)
    return np.where(s >= 0, 1.0, alpha * np.exp(np.minimum(s, 0.0)))


_VALUES = {
    "sigmoid": lambda s: expit(s),
    "tanh": np.tanh,
    "relu": lambda s: np.maximum(s, 0.0),
    "softplus": softplus,
    "leaky_relu": lambda s, alpha: np.where(s >= 0, s, alpha * s),
    "elu": elu,
    "selu": lambda s, lam, alpha: lam * elu(s, alpha),
    "swish": lambda s: s * expit(s),
    "identity": lambda s: s,
}


def _swish_grad(s):
    sg = expit(s)
    return sg + s * sg * (1.0 - sg)


_GRADS = {
    "sigmoid": lambda s: expit(s) * (1.0 - expit(s)),
    "tanh": lambda s: 1.0 - np.tanh(s) ** 2,
    "relu": lambda s: (s > 0).astype(np.float64),
    "softplus": lambda s: expit(s),
    "leaky_relu": lambda s, alpha: np.where(s > 0, 1.0, alpha),
    "elu": _elu_grad,
    "selu": lambda s, lam, alpha: lam * _elu_grad(s, alpha),
    "swish": _swish_grad,
    "identity": lambda s: np.ones_like(s),
}


def check_fixed(kind, **hyper):
    """Validate ``kind`` and fill in default hyper-parameters."""
    if kind not in DEFAULTS:
        raise ConfigError(f"unknown fixed activation {kind!r}; expected one of {sorted(DEFAULTS)}")
    unknown = set(hyper) - set(DEFAULTS[kind])
    if unknown:
        raise ConfigError(f"{kind} does not accept {sorted(unknown)}")
    params = {**DEFAULTS[kind], **hyper}
    if kind in ("leaky_relu", "elu", "selu") and params["alpha"] <= 0:
        raise ConfigError(f"{kind} requires alpha > 0")
    if kind == "selu" and params["lam"] <= 1:
        raise ConfigError("selu requires lam > 1")
    return params


def eval_fixed(kind, s, **hyper):
    params = check_fixed(kind, **hyper)
    out = _VALUES[kind](np.asarray(s, dtype=np.float64), **params)
    return out[()] if np.ndim(out) == 0 else out


def grad_fixed(kind, s, **hyper):
    params = check_fixed(kind, **hyper)
    out = _GRADS[kind](np.asarray(s, dtype=np.float64), **params)
    return out[()] if np.ndim(out) == 0 else out


class FixedActivation(ElementwiseActivation):
    family = "fixed"

    def __init__(self, n_units, name="tanh", **hyper):
        super().__init__(n_units)
        self.name = name
        self.hyper = check_fixed(name, **hyper)

    def _value(self, s):
        return _VALUES[self.name](s, **self.hyper)

    def _derivatives(self, s):
        return _GRADS[self.name](s, **self.hyper), {}

    def hyperparameters(self):
        return dict(self.hyper)


class RandomizedLeakyReLU(ElementwiseActivation):
    """Leaky ReLU whose slope is drawn from U(lower, upper) at every training
    step; at test time the slope is the midpoint (lower + upper) / 2."""

    family = "fixed"
    name = "rrelu"

    def __init__(self, n_units, lower=1.0 / 8, upper=1.0 / 3):
        if not 0 <= lower <= upper:
            raise ConfigError("rrelu requires 0 <= lower <= upper")
        super().__init__(n_units)
        self.lower = float(lower)
        self.upper = float(upper)
        self._slope = None

    @property
    def test_slope(self):
        return 0.5 * (self.lower + self.upper)

    def forward(self, x, training=False):
        if training:
            self._slope = self.rng.uniform(self.lower, self.upper, size=x.shape)
        else:
            self._slope = self.test_slope
        return super().forward(x, training)

    def _value(self, s):
        slope = self.test_slope if self._slope is None else self._slope
        return np.where(s >= 0, s, slope * s)

    def _derivatives(self, s):
        return np.where(s > 0, 1.0, self._slope), {}

    def hyperparameters(self):
        return {"lower": self.lower, "upper": self.upper}
