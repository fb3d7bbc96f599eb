"""Layer base class and the structural layers (dense, dropout, softmax).

Layers work on batches laid out as ``(n_samples, n_units)``.  Trainable
arrays live in ``params``; ``backward`` fills ``grads`` with the gradient of
the (batch-averaged) loss and returns the gradient w.r.t. the layer input.
"""
import numpy as np

from .exceptions import ConfigError
from .numeric import make_rng

# Regularization tags for parameter groups.  "default" resolves to the
# network-wide penalty kind; "none" marks an exempt group.
PENALTY_KINDS = ("default", "l2", "l1", "deviation", "none")


class Layer:
    family = "layer"

    def __init__(self, n_in, n_out):
        self.n_in = int(n_in)
        self.n_out = int(n_out)
        self.params = {}
        self.grads = {}
        self.penalty = {}
        self.reference = {}
        self.rng = make_rng(0)

    def forward(self, x, training=False):
        raise NotImplementedError

    def backward(self, grad):
        raise NotImplementedError

    def constrain(self):
        """Project parameters back onto their feasible set after an update."""

    def get_config(self):
        raise NotImplementedError

    @property
    def n_params(self):
        return int(sum(p.size for p in self.params.values()))

    def add_param(self, name, value, penalty="default"):
        if penalty not in PENALTY_KINDS:
            raise ConfigError(f"unknown penalty kind {penalty!r}")
        value = np.asarray(value, dtype=np.float64)
        self.params[name] = value
        self.grads[name] = np.zeros_like(value)
        self.penalty[name] = penalty
        if penalty == "deviation":
            self.reference[name] = value.copy()

    def __repr__(self):
        cfg = ", ".join(f"{k}={v!r}" for k, v in self.get_config().items() if k != "type")
        return f"{type(self).__name__}({cfg})"


def he_uniform(rng, n_in, shape):
    """'Uniform He' initialization: U(-sqrt(6/fan_in), +sqrt(6/fan_in))."""
    limit = np.sqrt(6.0 / n_in)
    return rng.uniform(-limit, limit, size=shape)


class Dense(Layer):
    family = "dense"

    def __init__(self, n_in, n_out, rng=None):
        super().__init__(n_in, n_out)
        rng = make_rng(rng)
        self.add_param("W", he_uniform(rng, n_in, (n_in, n_out)))
        self.add_param("b", np.zeros(n_out), penalty="none")
        self._x = None

    def forward(self, x, training=False):
        self._x = x
        return x @ self.params["W"] + self.params["b"]

    def backward(self, grad):
        self.grads["W"] = self._x.T @ grad
        self.grads["b"] = grad.sum(axis=0)
        return grad @ self.params["W"].T

    def get_config(self):
        return {"type": "dense", "n_in": self.n_in, "units": self.n_out}


class Dropout(Layer):
    """Inverted dropout: surviving units are scaled by 1/(1-p) at training time."""

    family = "dropout"

    def __init__(self, n_units, p=0.5):
        if not 0.0 <= p < 1.0:
            raise ConfigError(f"dropout probability must lie in [0, 1), got {p}")
        super().__init__(n_units, n_units)
        self.p = float(p)
        self._mask = None

    def forward(self, x, training=False):
        if not training or self.p == 0.0:
            self._mask = None
            return x
        self._mask = (self.rng.random(x.shape) >= self.p) / (1.0 - self.p)
        return x * self._mask

    def backward(self, grad):
        return grad if self._mask is None else grad * self._mask

    def get_config(self):
        return {"type": "dropout", "units": self.n_in, "p": self.p}


def softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class Softmax(Layer):
    family = "softmax"

    def __init__(self, n_units):
        super().__init__(n_units, n_units)
        self._p = None

    def forward(self, x, training=False):
        self._p = softmax(x)
        return self._p

    def backward(self, grad):
        p = self._p
        return p * (grad - (grad * p).sum(axis=1, keepdims=True))

    def get_config(self):
        return {"type": "softmax", "units": self.n_in}


class ElementwiseActivation(Layer):
    """Base for activations applied independently at every neuron.

    Subclasses implement ``_value(s)`` and ``_derivatives(s)``; the latter
    returns ``(dg/ds, {param: dg/dparam})`` where every parameter derivative
    has shape ``s.shape + param.shape[1:]``.
    """

    family = "activation"
    name = None

    def __init__(self, n_units):
        super().__init__(n_units, n_units)
        self._s = None

    def forward(self, x, training=False):
        self._s = x
        return self._value(x)

    def backward(self, grad):
        ds, dparams = self._derivatives(self._s)
        for name, d in dparams.items():
            g = grad.reshape(grad.shape + (1,) * (d.ndim - grad.ndim))
            self.grads[name] = (g * d).sum(axis=0)
        return grad * ds

    def _value(self, s):
        raise NotImplementedError

    def _derivatives(self, s):
        raise NotImplementedError

    def hyperparameters(self):
        return {}

    def get_config(self):
        return {"type": "activation", "name": self.name, "units": self.n_in, **self.hyperparameters()}
