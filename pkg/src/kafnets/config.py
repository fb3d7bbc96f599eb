"""Experiment configuration: JSON schema, defaults and strict validation."""
import json
from dataclasses import dataclass, field

import jsonschema

from .data import SYNTH_KINDS
from .exceptions import ConfigError
from .network import LOSSES, build_layers

_NUM = {"type": "number"}
_INT = {"type": "integer"}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["dataset", "architecture"],
    "properties": {
        "dataset": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": "string"},
                "label_column": {"type": ["integer", "string"]},
                "has_header": {"type": "boolean"},
                "missing_token": {"type": "string"},
                "synth": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {
                        "kind": {"enum": list(SYNTH_KINDS)},
                        "n": {"type": "integer", "minimum": 10},
                        "noise": {"type": "number", "minimum": 0},
                        "seed": _INT,
                    },
                },
            },
            "oneOf": [{"required": ["path"]}, {"required": ["synth"]}],
        },
        "task": {"enum": ["classification", "regression"]},
        "split": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "val": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "test": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "seed": _INT,
            },
        },
        "architecture": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["type"],
                "properties": {"type": {"enum": ["dense", "activation", "dropout", "maxout"]}},
            },
        },
        "optimizer": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "lr": {"type": "number", "exclusiveMinimum": 0},
                "beta1": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "beta2": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "eps": {"type": "number", "exclusiveMinimum": 0},
                "batch_size": {"type": "integer", "minimum": 1},
            },
        },
        "regularization": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "C": {"type": "number", "minimum": 0},
                "kind": {"enum": ["l1", "l2"]},
                "overrides": {
                    "type": "object",
                    "additionalProperties": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "kind": {"enum": ["l1", "l2", "deviation", "none"]},
                            "C": {"type": "number", "minimum": 0},
                        },
                    },
                },
            },
        },
        "patience": {"type": "integer", "minimum": 1},
        "max_epochs": {"type": "integer", "minimum": 1},
        "seed": _INT,
        "repeats": {"type": "integer", "minimum": 1},
        "output_dir": {"type": "string"},
        "input_dim": {"type": "integer", "minimum": 1},
        "n_outputs": {"type": "integer", "minimum": 1},
        "loss": {"enum": list(LOSSES)},
    },
}


@dataclass
class ExperimentConfig:
    dataset: dict
    architecture: list
    task: str = "classification"
    split: dict = field(default_factory=lambda: {"val": 0.15, "test": 0.15, "seed": 0})
    optimizer: dict = field(default_factory=dict)
    regularization: dict = field(default_factory=lambda: {"C": 1e-4, "kind": "l2", "overrides": {}})
    patience: int = 15
    max_epochs: int = 200
    seed: int = 0
    repeats: int = 1
    output_dir: str = "results"
    input_dim: int = None
    n_outputs: int = None
    loss: str = None

    @property
    def split_fractions(self):
        return (self.split.get("val", 0.15), self.split.get("test", 0.15))


def validate(doc):
    """Return an :class:`ExperimentConfig` or raise :class:`ConfigError`
    listing every violation."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: list(e.path)):
        where = "/".join(str(p) for p in err.path) or "<root>"
        errors.append(f"{where}: {err.message}")
    arch = doc.get("architecture")
    if isinstance(arch, list):
        # dry-build the network to catch bad layer arguments before any work
        try:
            dims = [doc.get(k) if isinstance(doc.get(k), int) and doc.get(k) > 0 else 2 for k in ("input_dim", "n_outputs")]
            build_layers(arch, dims[0], dims[1], "identity")
        except ConfigError as exc:
            errors.extend(exc.errors)
    split = {"val": 0.15, "test": 0.15, "seed": 0, **(doc.get("split") or {})}
    if isinstance(split.get("val"), (int, float)) and isinstance(split.get("test"), (int, float)) \
            and split["val"] + split["test"] >= 1:
        errors.append("split: val + test must leave a non-empty training part")
    if errors:
        raise ConfigError(errors)
    reg = {"C": 1e-4, "kind": "l2", "overrides": {}, **doc.get("regularization", {})}
    return ExperimentConfig(**{**doc, "split": split, "regularization": reg})


def load_config(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    return validate(doc)
