"""Parametric activations with a handful of trainable scalars per neuron.

Every family comes with a regularization policy: PReLU, SReLU and
beta-swish parameters are exempt from the weight penalty, while the
generalized tanh and PELU parameters are penalized like ordinary weights
(an unpenalized PELU can trade tiny linear weights for huge alpha/beta).
"""
import numpy as np
from scipy.special import expit

from ..exceptions import ConfigError
from ..layers import ElementwiseActivation

# name -> (parameter names, initializer, penalty tag)
FAMILIES = {
    "gen_tanh": (("a", "b"), "default"),
    "prelu": (("alpha",), "none"),
    "pelu": (("alpha", "beta"), "default"),
    "srelu": (("tr", "ar", "tl", "al"), "none"),
    "beta_swish": (("beta",), "none"),
}

POSITIVE = {"gen_tanh": ("a", "b"), "pelu": ("alpha", "beta")}
MIN_POSITIVE = 1e-4


def regularization_exempt(kind):
    return FAMILIES[kind][1] == "none"


def _check(kind, params):
    if kind not in FAMILIES:
        raise ConfigError(f"unknown parametric activation {kind!r}; expected one of {sorted(FAMILIES)}")
    names = FAMILIES[kind][0]
    if set(params) != set(names):
        raise ConfigError(f"{kind} expects parameters {names}, got {sorted(params)}")
    for name in POSITIVE.get(kind, ()):
        if np.any(np.asarray(params[name]) <= 0):
            raise ValueError(f"{kind} parameter {name} must be positive")
    if kind == "srelu" and np.any(np.asarray(params["tr"]) < np.asarray(params["tl"])):
        raise ValueError("srelu requires tr >= tl")


def _value(kind, s, p):
    if kind == "gen_tanh":
        # a(1 - e^{-bs}) / (1 + e^{-bs}) == a tanh(bs/2)
        return p["a"] * np.tanh(0.5 * p["b"] * s)
    if kind == "prelu":
        return np.where(s >= 0, s, p["alpha"] * s)
    if kind == "pelu":
        alpha, beta = p["alpha"], p["beta"]
        neg = alpha * np.expm1(np.minimum(s, 0.0) / beta)
        return np.where(s >= 0, (alpha / beta) * s, neg)
    if kind == "srelu":
        tr, ar, tl, al = p["tr"], p["ar"], p["tl"], p["al"]
        return np.where(s >= tr, tr + ar * (s - tr), np.where(s > tl, s, tl + al * (s - tl)))
    return s * expit(p["beta"] * s)


def _derivatives(kind, s, p):
    if kind == "gen_tanh":
        a, b = p["a"], p["b"]
        t = np.tanh(0.5 * b * s)
        sech2 = 1.0 - t * t
        return 0.5 * a * b * sech2, {"a": t, "b": 0.5 * a * s * sech2}
    if kind == "prelu":
        neg = s < 0
        return np.where(neg, p["alpha"], 1.0), {"alpha": np.where(neg, s, 0.0)}
    if kind == "pelu":
        alpha, beta = p["alpha"], p["beta"]
        pos = s >= 0
        e = np.exp(np.minimum(s, 0.0) / beta)
        ds = np.where(pos, alpha / beta, (alpha / beta) * e)
        d_alpha = np.where(pos, s / beta, e - 1.0)
        d_beta = np.where(pos, -alpha * s / beta**2, -alpha * s * e / beta**2)
        return ds, {"alpha": d_alpha, "beta": d_beta}
    if kind == "srelu":
        tr, ar, tl, al = p["tr"], p["ar"], p["tl"], p["al"]
        right = s >= tr
        left = ~right & (s <= tl)
        zero = np.zeros_like(s)
        ds = np.where(right, ar, np.where(left, al, 1.0))
        return ds, {
            "tr": np.where(right, 1.0 - ar, zero),
            "ar": np.where(right, s - tr, zero),
            "tl": np.where(left, 1.0 - al, zero),
            "al": np.where(left, s - tl, zero),
        }
    beta = p["beta"]
    sg = expit(beta * s)
    dsg = sg * (1.0 - sg)
    return sg + beta * s * dsg, {"beta": s * s * dsg}


def _scalarize(x):
    return x[()] if np.ndim(x) == 0 else x


def eval_parametric(kind, s, **params):
    """Evaluate a parametric activation; ``params`` broadcast against ``s``."""
    _check(kind, params)
    s = np.asarray(s, dtype=np.float64)
    return _scalarize(_value(kind, s, params))


def grad_parametric(kind, s, **params):
    """Return ``(dg/ds, {name: dg/dparam})``.

    At segment boundaries the ``>=`` branch is used, e.g. PReLU at ``s = 0``
    has slope 1 and zero derivative w.r.t. alpha.
    """
    _check(kind, params)
    s = np.asarray(s, dtype=np.float64)
    ds, dp = _derivatives(kind, s, params)
    return _scalarize(np.asarray(ds, dtype=np.float64) * np.ones_like(s)), {
        k: _scalarize(np.asarray(v, dtype=np.float64) * np.ones_like(s)) for k, v in dp.items()
    }


def initial_parameters(kind, n_units, rng):
    if kind == "gen_tanh":
        return {"a": rng.uniform(0.5, 2.0, n_units), "b": rng.uniform(0.5, 2.0, n_units)}
    if kind == "prelu":
        return {"alpha": np.full(n_units, 0.25)}
    if kind == "pelu":
        return {"alpha": np.ones(n_units), "beta": np.ones(n_units)}
    if kind == "srelu":
        return {
            "tr": np.ones(n_units),
            "ar": np.ones(n_units),
            "tl": -np.ones(n_units),
            "al": np.full(n_units, 0.01),
        }
    return {"beta": np.ones(n_units)}


class ParametricActivation(ElementwiseActivation):
    """Per-neuron parametric activation (each neuron owns its parameters)."""

    family = "parametric"

    def __init__(self, n_units, name="prelu", rng=None, **init):
        if name not in FAMILIES:
            raise ConfigError(f"unknown parametric activation {name!r}; expected one of {sorted(FAMILIES)}")
        super().__init__(n_units)
        self.name = name
        names, penalty = FAMILIES[name]
        rng = rng if rng is not None else np.random.default_rng(0)
        values = initial_parameters(name, n_units, rng)
        for key, value in init.items():
            if key not in names:
                raise ConfigError(f"{name} has no parameter {key!r}")
            values[key] = np.full(n_units, float(value))
        _check(name, values)
        for key in names:
            self.add_param(key, values[key], penalty=penalty)

    def _value(self, s):
        return _value(self.name, s, self.params)

    def _derivatives(self, s):
        return _derivatives(self.name, s, self.params)

    def constrain(self):
        for key in POSITIVE.get(self.name, ()):
            np.maximum(self.params[key], MIN_POSITIVE, out=self.params[key])
        if self.name == "srelu":
            np.maximum(self.params["tr"], self.params["tl"], out=self.params["tr"])
