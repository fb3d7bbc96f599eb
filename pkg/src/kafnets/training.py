"""Adam, mini-batch training with early stopping, and evaluation metrics."""
import logging
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .exceptions import NumericError
from .numeric import make_rng

logger = logging.getLogger(__name__)


class Adam:
    """Bias-corrected Adam over a dict of named arrays (updated in place)."""

    def __init__(self, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m = {}
        self.v = {}

    def step(self, params, grads):
        for name, g in grads.items():
            if not np.all(np.isfinite(g)):
                raise NumericError(f"non-finite gradient for parameter group {name}")
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        corr1 = 1.0 - b1**self.t
        corr2 = 1.0 - b2**self.t
        for name, g in grads.items():
            if name not in self.m:
                self.m[name] = np.zeros_like(g)
                self.v[name] = np.zeros_like(g)
            m = self.m[name]
            v = self.v[name]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            params[name] -= self.lr * (m / corr1) / (np.sqrt(v / corr2) + self.eps)


class EarlyStopping:
    """Stop once the monitored metric (higher is better) has not strictly
    improved for ``patience`` consecutive epochs; remembers the best state."""

    def __init__(self, patience=15):
        if patience < 1:
            raise ValueError("patience must be >= 1")
        self.patience = patience
        self.best = -np.inf
        self.best_epoch = None
        self.best_state = None
        self.wait = 0

    def update(self, epoch, metric, state=None):
        """Record an epoch; returns True when training should stop."""
        if metric > self.best:
            self.best = metric
            self.best_epoch = epoch
            self.best_state = state
            self.wait = 0
            return False
        self.wait += 1
        return self.wait >= self.patience


def metric_accuracy(y_true, scores):
    """Fraction correct; ``scores`` are class scores (n, C), a positive-class
    probability column (n, 1)/(n,), or hard labels of the same shape as y."""
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim == 2 and scores.shape[1] > 1:
        pred = scores.argmax(axis=1)
    else:
        scores = scores.ravel()
        pred = (scores >= 0.5).astype(int) if np.all((scores >= 0) & (scores <= 1)) else scores
    return float(np.mean(pred == y_true.ravel()))


def metric_auc(y_true, scores):
    """Probability that a random positive outranks a random negative (ties
    count one half), computed from Mann-Whitney ranks."""
    y = np.asarray(y_true).ravel().astype(bool)
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim == 2:
        s = s[:, -1]
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC is undefined when y_true holds a single class")
    ranks = rankdata(s)
    return float((ranks[y].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def validation_score(net, X, y, task):
    """Higher-is-better model-selection metric for early stopping."""
    out = net.predict(X)
    if task == "regression":
        return -float(((out.ravel() - np.asarray(y, dtype=np.float64).ravel()) ** 2).mean())
    if out.shape[1] == 1:
        try:
            return metric_auc(y, out)
        except ValueError:
            return metric_accuracy(y, out)
    return metric_accuracy(y, out)


@dataclass
class TrainConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 100
    max_epochs: int = 200
    patience: int = 15
    seed: int = 0


@dataclass
class TrainResult:
    history: list = field(default_factory=list)
    best_epoch: int = 0
    best_score: float = float("-inf")
    epochs_run: int = 0


def train(net, X_train, y_train, X_val, y_val, config=None, task="classification"):
    """Mini-batch Adam with per-epoch shuffling and early stopping.

    The last partial batch is kept.  On exit the parameters of the best
    validation epoch are restored.
    """
    config = config or TrainConfig()
    X_train = np.asarray(X_train, dtype=np.float64)
    y_train = np.asarray(y_train)
    if len(X_train) == 0 or len(X_val) == 0:
        raise ValueError("training and validation sets must be non-empty")
    if task == "classification" and np.unique(y_train).size < 2:
        logger.warning("training labels contain a single class")
    rng = make_rng(config.seed)
    net.rng = rng
    for layer in net.layers:
        layer.rng = rng
    opt = Adam(config.lr, config.beta1, config.beta2, config.eps)
    stopper = EarlyStopping(config.patience)
    params = net.parameters()
    result = TrainResult()
    n = X_train.shape[0]
    for epoch in range(1, config.max_epochs + 1):
        start = time.perf_counter()
        order = rng.permutation(n)
        total = 0.0
        for lo in range(0, n, config.batch_size):
            idx = order[lo:lo + config.batch_size]
            value, grads = net.loss_and_grad(X_train[idx], y_train[idx], training=True)
            opt.step(params, grads)
            net.constrain()
            total += value * idx.size
        score = validation_score(net, X_val, y_val, task)
        result.history.append({
            "epoch": epoch,
            "train_loss": total / n,
            "val_metric": score,
            "wall_time_ms": (time.perf_counter() - start) * 1000.0,
        })
        result.epochs_run = epoch
        if stopper.update(epoch, score, net.get_state()):
            break
    if stopper.best_state is not None:
        net.set_state(stopper.best_state)
    result.best_epoch = stopper.best_epoch
    result.best_score = stopper.best
    return result
