"""Feedforward networks: layer construction, propagation, losses,
regularization groups, parameter counting and JSON persistence."""
import json

import numpy as np

from .activations.fixed import DEFAULTS as FIXED_DEFAULTS
from .activations.fixed import FixedActivation, RandomizedLeakyReLU
from .activations.nonparametric import APL, PAF, SAF, Maxout
from .activations.parametric import FAMILIES as PARAMETRIC_FAMILIES
from .activations.parametric import ParametricActivation
from .exceptions import ConfigError, NumericError
from .kaf import KAF, KAF2D
from .layers import Dense, Dropout, ElementwiseActivation, Softmax
from .numeric import make_rng

FORMAT_VERSION = 1
LOSSES = ("cross_entropy_softmax", "binary_cross_entropy", "squared")
PROB_FLOOR = 1e-12

NONPARAMETRIC = {"apl": APL, "paf": PAF, "saf": SAF, "kaf": KAF}
ACTIVATION_NAMES = tuple(FIXED_DEFAULTS) + ("rrelu",) + tuple(PARAMETRIC_FAMILIES) + tuple(NONPARAMETRIC) + ("kaf2d",)


def _split_activation_spec(spec):
    if isinstance(spec, str):
        return spec, {}
    if isinstance(spec, dict) and "name" in spec:
        rest = {k: v for k, v in spec.items() if k not in ("name", "type", "units")}
        return spec["name"], rest
    raise ConfigError(f"activation spec must be a name or a dict with 'name', got {spec!r}")


def make_activation(spec, n_units, rng=None):
    """Build an activation layer of width ``n_units`` from a config entry
    such as ``"relu"`` or ``{"name": "kaf", "D": 20, "init": "krr:tanh"}``."""
    name, kwargs = _split_activation_spec(spec)
    rng = make_rng(rng)
    try:
        if name in FIXED_DEFAULTS:
            return FixedActivation(n_units, name, **kwargs)
        if name == "rrelu":
            return RandomizedLeakyReLU(n_units, **kwargs)
        if name in PARAMETRIC_FAMILIES:
            return ParametricActivation(n_units, name, rng=rng, **kwargs)
        if name in NONPARAMETRIC:
            return NONPARAMETRIC[name](n_units, rng=rng, **kwargs)
        if name == "kaf2d":
            return KAF2D(n_units, rng=rng, **kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad arguments for activation {name!r}: {exc}") from exc
    raise ConfigError(f"unknown activation {name!r}; expected one of {sorted(ACTIVATION_NAMES)}")


def build_layers(architecture, n_inputs, n_outputs, head, rng=None):
    """Expand hidden-layer specs and append the output head.

    ``head`` is ``"softmax"``, ``"sigmoid"`` or ``"identity"``.
    """
    rng = make_rng(rng)
    layers = []
    width = int(n_inputs)
    errors = []
    for i, spec in enumerate(architecture):
        if not isinstance(spec, dict) or "type" not in spec:
            errors.append(f"architecture[{i}]: expected an object with a 'type' key")
            continue
        kind = spec["type"]
        try:
            if kind == "dense":
                layers.append(Dense(width, spec["units"], rng=rng))
                width = spec["units"]
                if spec.get("activation") is not None:
                    layers.append(make_activation(spec["activation"], width, rng))
                    width = layers[-1].n_out
            elif kind == "activation":
                layers.append(make_activation(spec, width, rng))
                width = layers[-1].n_out
            elif kind == "dropout":
                layers.append(Dropout(width, spec.get("p", 0.5)))
            elif kind == "maxout":
                extra = {k: spec[k] for k in ("K", "variant", "p") if k in spec}
                layers.append(Maxout(width, spec["units"], rng=rng, **extra))
                width = spec["units"]
            else:
                errors.append(f"architecture[{i}]: unknown layer type {kind!r}")
        except ConfigError as exc:
            errors.extend(f"architecture[{i}]: {e}" for e in exc.errors)
        except KeyError as exc:
            errors.append(f"architecture[{i}]: missing key {exc}")
        except (TypeError, ValueError) as exc:
            errors.append(f"architecture[{i}]: {exc}")
    if errors:
        raise ConfigError(errors)
    layers.append(Dense(width, n_outputs, rng=rng))
    if head == "softmax":
        layers.append(Softmax(n_outputs))
    elif head == "sigmoid":
        layers.append(FixedActivation(n_outputs, "sigmoid"))
    elif head != "identity":
        raise ConfigError(f"unknown output head {head!r}")
    return layers


def layer_from_config(config, rng=None):
    config = dict(config)
    kind = config.pop("type")
    if kind == "dense":
        return Dense(config["n_in"], config["units"], rng=rng)
    if kind == "dropout":
        return Dropout(config["units"], config["p"])
    if kind == "softmax":
        return Softmax(config["units"])
    if kind == "maxout":
        return Maxout(config["n_in"], config["units"], K=config["K"], variant=config["variant"],
                      p=config.get("p", 2), rng=rng)
    if kind == "activation":
        return make_activation(config, config["units"], rng)
    raise ConfigError(f"unknown layer type {kind!r}")


# ---------------------------------------------------------------- losses ----

def _one_hot(y, n_classes):
    y = np.asarray(y)
    if y.ndim == 2:
        return y.astype(np.float64)
    out = np.zeros((y.shape[0], n_classes))
    out[np.arange(y.shape[0]), y.astype(np.intp)] = 1.0
    return out


def loss_eval(kind, y, y_hat):
    """Batch-mean loss.  ``y_hat`` holds probabilities for the two
    cross-entropy kinds; probabilities are floored at 1e-12 before logs."""
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y_hat.ndim == 1:
        y_hat = y_hat[:, None]
    if kind == "cross_entropy_softmax":
        Y = _one_hot(y, y_hat.shape[1])
        return float(-(Y * np.log(np.maximum(y_hat, PROB_FLOOR))).sum() / y_hat.shape[0])
    if kind == "binary_cross_entropy":
        t = np.asarray(y, dtype=np.float64).reshape(y_hat.shape)
        p = np.clip(y_hat, PROB_FLOOR, 1.0 - PROB_FLOOR)
        return float(-(t * np.log(p) + (1 - t) * np.log(1 - p)).mean())
    if kind == "squared":
        t = np.asarray(y, dtype=np.float64).reshape(y_hat.shape)
        return float(((y_hat - t) ** 2).sum() / y_hat.shape[0])
    raise ConfigError(f"unknown loss {kind!r}; expected one of {LOSSES}")


def _loss_grad(kind, y, y_hat):
    n = y_hat.shape[0]
    if kind == "cross_entropy_softmax":
        Y = _one_hot(y, y_hat.shape[1])
        return -Y / np.maximum(y_hat, PROB_FLOOR) / n
    t = np.asarray(y, dtype=np.float64).reshape(y_hat.shape)
    if kind == "binary_cross_entropy":
        p = np.clip(y_hat, PROB_FLOOR, 1.0 - PROB_FLOOR)
        return (p - t) / (p * (1 - p)) / n
    return 2.0 * (y_hat - t) / n


# ----------------------------------------------------------- penalties ----

def penalty_value(kind, w, ref=None):
    if kind == "l2":
        return float((w * w).sum())
    if kind == "l1":
        return float(np.abs(w).sum())
    if kind == "deviation":
        d = w - ref
        return float((d * d).sum())
    return 0.0


def penalty_grad(kind, w, ref=None):
    if kind == "l2":
        return 2.0 * w
    if kind == "l1":
        return np.sign(w)
    if kind == "deviation":
        return 2.0 * (w - ref)
    return np.zeros_like(w)


class Network:
    """Ordered stack of layers trained on ``J = mean loss + sum_g C_g r_g(w_g)``.

    Parameter groups are identified as ``"<layer index>.<param name>"``.
    Each group's penalty comes from its layer tag: ``default`` groups use
    ``penalty`` with weight ``C``; ``l2`` and ``deviation`` groups keep their
    own kind; ``none`` groups are exempt.  ``overrides`` maps a layer family
    (``"kaf"``, ``"dense"``, ...), ``"family.param"`` or a group id to a dict
    with ``kind`` and/or ``C``.
    """

    def __init__(self, layers, loss="cross_entropy_softmax", C=0.0, penalty="l2", overrides=None, seed=None):
        if loss not in LOSSES:
            raise ConfigError(f"unknown loss {loss!r}; expected one of {LOSSES}")
        if penalty not in ("l2", "l1"):
            raise ConfigError(f"network penalty must be 'l2' or 'l1', got {penalty!r}")
        self.layers = list(layers)
        self.loss = loss
        self.C = float(C)
        self.penalty = penalty
        self.overrides = dict(overrides or {})
        self.rng = make_rng(seed)
        for layer in self.layers:
            layer.rng = self.rng
        for a, b in zip(self.layers, self.layers[1:]):
            if a.n_out != b.n_in:
                raise ConfigError(f"layer {a!r} outputs {a.n_out} units but {b!r} expects {b.n_in}")
        self.groups = self._resolve_groups()

    def _resolve_groups(self):
        groups = {}
        errors = []
        for i, layer in enumerate(self.layers):
            for name, tag in layer.penalty.items():
                gid = f"{i}.{name}"
                kind = self.penalty if tag == "default" else tag
                C = 0.0 if kind == "none" else self.C
                for key in (layer.family, f"{layer.family}.{name}", gid):
                    if key in self.overrides:
                        ov = self.overrides[key]
                        kind = ov.get("kind", kind)
                        C = float(ov.get("C", C))
                if kind not in ("l2", "l1", "deviation", "none"):
                    errors.append(f"group {gid}: unknown penalty kind {kind!r}")
                if tag == "l2" and kind == "l1":
                    errors.append(f"group {gid}: {layer.family} parameters only accept l2 regularization")
                if kind == "deviation" and name not in layer.reference:
                    layer.reference[name] = layer.params[name].copy()
                groups[gid] = (i, name, kind, C)
        if errors:
            raise ConfigError(errors)
        return groups

    @property
    def n_inputs(self):
        return self.layers[0].n_in

    @property
    def n_outputs(self):
        return self.layers[-1].n_out

    def parameters(self):
        return {gid: self.layers[i].params[name] for gid, (i, name, _, _) in self.groups.items()}

    def forward(self, x, training=False):
        h = np.asarray(x, dtype=np.float64)
        if h.ndim != 2 or h.shape[1] != self.n_inputs:
            raise ConfigError(f"expected input with {self.n_inputs} columns, got shape {h.shape}")
        with np.errstate(over="ignore", invalid="ignore"):
            for i, layer in enumerate(self.layers):
                h = layer.forward(h, training)
                if not np.all(np.isfinite(h)):
                    raise NumericError(f"non-finite output in layer {i} ({layer!r})")
        return h

    def regularization(self):
        total = 0.0
        for i, name, kind, C in self.groups.values():
            if C and kind != "none":
                layer = self.layers[i]
                total += C * penalty_value(kind, layer.params[name], layer.reference.get(name))
        return total

    def objective(self, x, y, training=False):
        return loss_eval(self.loss, y, self.forward(x, training)) + self.regularization()

    def _fused_head(self):
        last = self.layers[-1]
        if self.loss == "cross_entropy_softmax" and isinstance(last, Softmax):
            return True
        return (
            self.loss == "binary_cross_entropy"
            and isinstance(last, FixedActivation)
            and last.name == "sigmoid"
        )

    def backward(self, y, y_hat):
        """Back-propagate from the stored forward pass.

        Returns ``{group id: dJ/dparam}`` including the penalty terms; the
        gradient with respect to the network input is kept in ``input_grad``.
        """
        layers = self.layers
        if self._fused_head():
            # softmax + cross-entropy and sigmoid + log-loss share (p - y) / n
            n = y_hat.shape[0]
            if self.loss == "cross_entropy_softmax":
                grad = (y_hat - _one_hot(y, y_hat.shape[1])) / n
            else:
                grad = (y_hat - np.asarray(y, dtype=np.float64).reshape(y_hat.shape)) / n
            layers = layers[:-1]
        else:
            grad = _loss_grad(self.loss, y, y_hat)
        for layer in reversed(layers):
            grad = layer.backward(grad)
        self.input_grad = grad
        grads = {}
        for gid, (i, name, kind, C) in self.groups.items():
            layer = self.layers[i]
            g = layer.grads[name]
            if C and kind != "none":
                g = g + C * penalty_grad(kind, layer.params[name], layer.reference.get(name))
            grads[gid] = g
        return grads

    def loss_and_grad(self, x, y, training=True):
        y_hat = self.forward(x, training)
        value = loss_eval(self.loss, y, y_hat) + self.regularization()
        return value, self.backward(y, y_hat)

    def constrain(self):
        for layer in self.layers:
            layer.constrain()

    def get_state(self):
        return {gid: p.copy() for gid, p in self.parameters().items()}

    def set_state(self, state):
        for gid, value in state.items():
            i, name, _, _ = self.groups[gid]
            self.layers[i].params[name][...] = value

    def predict(self, x):
        return self.forward(x, training=False)


def count_parameters(net):
    """Trainable-weight count, total and per layer."""
    per_layer = []
    for i, layer in enumerate(net.layers):
        cfg = layer.get_config()
        per_layer.append({"index": i, "type": cfg["type"], "name": cfg.get("name"), "params": layer.n_params})
    return {"total": sum(item["params"] for item in per_layer), "layers": per_layer}


# ----------------------------------------------------------- persistence ----

def _encode(a):
    a = np.asarray(a, dtype=np.float64)
    return {"shape": list(a.shape), "data": [float(v) for v in a.ravel()]}


def _decode(obj):
    return np.asarray(obj["data"], dtype=np.float64).reshape(obj["shape"])


def network_to_dict(net):
    layers = []
    for layer in net.layers:
        entry = {"config": layer.get_config(), "params": {k: _encode(v) for k, v in layer.params.items()}}
        if layer.reference:
            entry["reference"] = {k: _encode(v) for k, v in layer.reference.items()}
        if hasattr(layer, "initial_alpha"):
            entry["initial"] = {"alpha": _encode(layer.initial_alpha)}
        if hasattr(layer, "dictionary"):
            d = layer.dictionary
            entry["dictionary"] = {"D": d.size, "lo": d.lo, "hi": d.hi, "spacing": d.spacing, "gamma": d.gamma}
            if isinstance(layer, KAF2D):
                entry["dictionary"]["gamma_2d"] = layer.gamma
        layers.append(entry)
    return {
        "format_version": FORMAT_VERSION,
        "loss": net.loss,
        "regularization": {"C": net.C, "kind": net.penalty, "overrides": net.overrides},
        "layers": layers,
    }


def network_from_dict(doc):
    if doc.get("format_version") != FORMAT_VERSION:
        raise ConfigError(f"unsupported model format version {doc.get('format_version')!r}")
    layers = []
    for entry in doc["layers"]:
        layer = layer_from_config(entry["config"])
        for name, value in entry["params"].items():
            layer.params[name] = _decode(value)
            layer.grads[name] = np.zeros_like(layer.params[name])
        for name, value in entry.get("reference", {}).items():
            layer.reference[name] = _decode(value)
        if "initial" in entry:
            layer.initial_alpha = _decode(entry["initial"]["alpha"])
        layers.append(layer)
    reg = doc.get("regularization", {})
    return Network(layers, loss=doc["loss"], C=reg.get("C", 0.0), penalty=reg.get("kind", "l2"),
                   overrides=reg.get("overrides"))


def save_model(path, net, **meta):
    """Write the network plus arbitrary JSON metadata to ``path``.

    Floats are written with Python's shortest round-trip repr, so a reload
    reproduces every parameter bit for bit.
    """
    doc = network_to_dict(net)
    doc.update(meta)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def load_model(path):
    """Return ``(network, document)``."""
    with open(path) as fh:
        doc = json.load(fh)
    return network_from_dict(doc), doc


__all__ = [
    "ElementwiseActivation",
    "Network",
    "build_layers",
    "count_parameters",
    "load_model",
    "loss_eval",
    "make_activation",
    "save_model",
]
