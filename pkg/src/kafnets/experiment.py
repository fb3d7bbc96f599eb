"""Config-driven experiment runner and activation-shape export."""
import csv
import json
import logging
import os

import numpy as np

from .data import MinMaxMedianScaler, load_csv, split, synth
from .exceptions import ConfigError, DataError
from .kaf import KAF, KAF2D
from .layers import ElementwiseActivation
from .network import Network, build_layers, count_parameters, load_model, save_model
from .training import TrainConfig, metric_accuracy, metric_auc, train

logger = logging.getLogger(__name__)

HISTORY_FIELDS = ("run", "epoch", "train_loss", "val_metric", "wall_time_ms")


def load_dataset(cfg):
    ds_cfg = cfg.dataset
    if "synth" in ds_cfg:
        s = ds_cfg["synth"]
        return synth(s["kind"], s.get("n", 1000), s.get("noise", 0.1), s.get("seed", 0))
    try:
        return load_csv(
            ds_cfg["path"],
            label_column=ds_cfg.get("label_column", -1),
            has_header=ds_cfg.get("has_header", False),
            missing_token=ds_cfg.get("missing_token", "?"),
            task=cfg.task,
        )
    except OSError as exc:
        raise DataError(f"{ds_cfg['path']}: {exc.strerror}") from exc


def _head(task, n_classes):
    if task == "regression":
        return "identity", "squared", 1
    if n_classes == 2:
        return "sigmoid", "binary_cross_entropy", 1
    return "softmax", "cross_entropy_softmax", n_classes


def build_network(cfg, n_inputs, n_classes=2, seed=0):
    head, loss, n_out = _head(cfg.task, n_classes)
    if cfg.n_outputs is not None:
        n_out = cfg.n_outputs
    layers = build_layers(cfg.architecture, n_inputs, n_out, head, rng=np.random.default_rng(seed))
    reg = cfg.regularization
    return Network(layers, loss=cfg.loss or loss, C=reg["C"], penalty=reg["kind"],
                   overrides=reg.get("overrides"), seed=seed)


def score_metrics(net, X, y, task):
    out = net.predict(X)
    if task == "regression":
        return {"test_mse": float(((out[:, 0] - y) ** 2).mean())}
    metrics = {"test_accuracy": metric_accuracy(y, out)}
    if out.shape[1] == 1 and np.unique(y).size == 2:
        metrics["test_auc"] = metric_auc(y, out)
    return metrics


def run_experiment(cfg, output_dir=None):
    """Train ``cfg.repeats`` seeded runs and write history.csv, metrics.json,
    params.json and model.json (first run) under the output directory.

    Run ``r`` uses split seed ``split.seed + r`` and network seed
    ``seed + r``.  Returns the metrics document.
    """
    out_dir = output_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    ds = load_dataset(cfg)
    classes = None
    if cfg.task == "classification":
        classes, encoded = np.unique(ds.labels, return_inverse=True)
        ds.labels = encoded
    n_classes = 0 if classes is None else len(classes)
    opt = cfg.optimizer
    runs = []
    history_rows = []
    for r in range(cfg.repeats):
        train_ds, val_ds, test_ds = split(ds, cfg.split_fractions, seed=cfg.split["seed"] + r)
        scaler = MinMaxMedianScaler().fit(train_ds.features)
        Xtr, Xva, Xte = (scaler.transform(d.features) for d in (train_ds, val_ds, test_ds))
        seed = cfg.seed + r
        net = build_network(cfg, Xtr.shape[1], n_classes, seed)
        tcfg = TrainConfig(
            lr=opt.get("lr", 1e-3), beta1=opt.get("beta1", 0.9), beta2=opt.get("beta2", 0.999),
            eps=opt.get("eps", 1e-8), batch_size=opt.get("batch_size", 100),
            max_epochs=cfg.max_epochs, patience=cfg.patience, seed=seed,
        )
        result = train(net, Xtr, train_ds.labels, Xva, val_ds.labels, tcfg, task=cfg.task)
        metrics = {"run": r, "seed": seed, "epochs": result.epochs_run, "best_epoch": result.best_epoch,
                   "best_val_metric": result.best_score}
        metrics.update(score_metrics(net, Xte, test_ds.labels, cfg.task))
        runs.append(metrics)
        history_rows.extend({"run": r, **row} for row in result.history)
        logger.info("run %d: %s", r, metrics)
        if r == 0:
            counts = count_parameters(net)
            meta = {
                "task": cfg.task,
                "classes": None if classes is None else classes.tolist(),
                "preprocessor": scaler.to_dict(),
                "dataset": {k: v for k, v in cfg.dataset.items() if k != "synth"},
            }
            save_model(os.path.join(out_dir, "model.json"), net, **meta)
    keys = [k for k in runs[0] if k.startswith("test_")]
    doc = {
        "runs": runs,
        "mean": {k: float(np.mean([m[k] for m in runs])) for k in keys},
        "std": {k: float(np.std([m[k] for m in runs])) for k in keys},
        "n_params": counts["total"],
    }
    with open(os.path.join(out_dir, "metrics.json"), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
    with open(os.path.join(out_dir, "params.json"), "w") as fh:
        json.dump(counts, fh, indent=2)
    with open(os.path.join(out_dir, "history.csv"), "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=HISTORY_FIELDS)
        writer.writeheader()
        writer.writerows(history_rows)
    return doc


def count_params_for_config(cfg):
    """Parameter counts for a config; the input width and output count come
    from ``input_dim``/``n_outputs`` when given, otherwise from the data."""
    if cfg.input_dim is not None:
        n_in = cfg.input_dim
        n_classes = cfg.n_outputs if cfg.n_outputs and cfg.n_outputs > 1 else 2
    else:
        ds = load_dataset(cfg)
        n_in = ds.features.shape[1]
        n_classes = np.unique(ds.labels).size if cfg.task == "classification" else 0
    return count_parameters(build_network(cfg, n_in, n_classes, cfg.seed))


def evaluate_model(model_path, data_path):
    """Score a saved model on a CSV file laid out like its training data."""
    net, doc = load_model(model_path)
    ds_meta = doc.get("dataset", {})
    task = doc.get("task", "classification")
    ds = load_csv(data_path, label_column=ds_meta.get("label_column", -1),
                  has_header=ds_meta.get("has_header", False),
                  missing_token=ds_meta.get("missing_token", "?"), task=task)
    X = MinMaxMedianScaler.from_dict(doc["preprocessor"]).transform(ds.features)
    y = ds.labels
    if task == "classification":
        classes = np.asarray(doc["classes"])
        unknown = np.setdiff1d(y, classes)
        if unknown.size:
            raise DataError(f"labels {unknown.tolist()} were not seen during training")
        y = np.searchsorted(classes, y)
    return score_metrics(net, X, y, task)


# ------------------------------------------------------------- shapes ----

def _plottable_layers(net):
    return [i for i, layer in enumerate(net.layers)
            if (isinstance(layer, ElementwiseActivation) or isinstance(layer, KAF2D)) and i < len(net.layers) - 1]


def parse_selector(selector, net):
    """``"L:i,j"``, ``"L:a-b"`` or ``"L:all"``; several selections are
    separated by ``;``.  Returns a list of ``(layer, neuron)`` pairs."""
    valid = _plottable_layers(net)
    picked = []
    for part in filter(None, (p.strip() for p in selector.split(";"))):
        try:
            layer_s, neurons_s = part.split(":")
            li = int(layer_s)
        except ValueError:
            raise ConfigError(f"bad neuron selector {part!r}; expected LAYER:NEURONS") from None
        if li not in valid:
            raise ConfigError(f"layer {li} has no plottable activation; valid layer indices: {valid}")
        n_units = net.layers[li].n_out
        if neurons_s == "all":
            picked.extend((li, i) for i in range(n_units))
            continue
        for tok in neurons_s.split(","):
            if "-" in tok:
                a, b = (int(v) for v in tok.split("-"))
                idx = range(a, b + 1)
            else:
                idx = [int(tok)]
            for i in idx:
                if not 0 <= i < n_units:
                    raise ConfigError(f"neuron {i} out of range for layer {li}; valid indices: 0-{n_units - 1}")
                picked.append((li, i))
    if not picked:
        raise ConfigError(f"empty neuron selector; valid layer indices: {valid}")
    return picked


def neuron_shape(layer, neuron, grid):
    """Rows of the exported shape for one neuron: ``(s, g[, g_init])`` for
    1-D activations, ``(s1, s2, g[, g_init])`` for 2-D KAFs."""
    if isinstance(layer, KAF2D):
        s1, s2 = np.meshgrid(grid, grid, indexing="ij")
        X = np.zeros((s1.size, layer.n_in))
        X[:, 2 * neuron] = s1.ravel()
        X[:, 2 * neuron + 1] = s2.ravel()
        cols = [s1.ravel(), s2.ravel(), layer.forward(X)[:, neuron]]
    else:
        X = np.tile(grid[:, None], (1, layer.n_in))
        cols = [grid, layer.forward(X)[:, neuron]]
    if isinstance(layer, (KAF, KAF2D)):
        current = layer.params["alpha"].copy()
        layer.params["alpha"][...] = layer.initial_alpha
        cols.append(layer.forward(X)[:, neuron])
        layer.params["alpha"][...] = current
    return np.column_stack(cols)


def export_shapes(model_path, selector, lo, hi, points, out_dir):
    """Write one CSV per selected neuron to ``out_dir``; returns the paths."""
    if points < 2 or not lo < hi:
        raise ConfigError("export grid needs lo < hi and at least 2 points")
    net, _ = load_model(model_path)
    grid = np.linspace(lo, hi, points)
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for li, ni in parse_selector(selector, net):
        layer = net.layers[li]
        rows = neuron_shape(layer, ni, grid)
        two_d = isinstance(layer, KAF2D)
        header = ["s1", "s2", "g"] if two_d else ["s", "g"]
        if rows.shape[1] > len(header):
            header.append("g_init")
        path = os.path.join(out_dir, f"layer{li}_neuron{ni}.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows([repr(float(v)) for v in row] for row in rows)
        paths.append(path)
    return paths
