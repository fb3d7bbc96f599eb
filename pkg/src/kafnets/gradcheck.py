"""Central finite-difference gradient checking."""
import numpy as np


def relative_error(analytic, numeric):
    """Elementwise ``|a - n| / max(1, |a|, |n|)``: relative for large
    gradients, absolute near zero where round-off dominates."""
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    return np.abs(a - n) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(n)))


def numerical_gradient(f, x, h=1e-6):
    """Central differences of the scalar function ``f`` w.r.t. the array
    ``x``, perturbed in place and restored."""
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        i = it.multi_index
        orig = x[i]
        x[i] = orig + h
        fp = f()
        x[i] = orig - h
        fm = f()
        x[i] = orig
        grad[i] = (fp - fm) / (2.0 * h)
    return grad


def check_network(net, X, y, h=1e-6):
    """Compare back-propagated gradients of the full objective with finite
    differences for every parameter group and for the input.

    Returns ``{group id or "input": max relative error}``.
    """
    X = np.array(X, dtype=np.float64)
    _, grads = net.loss_and_grad(X, y, training=False)
    grads = {k: v.copy() for k, v in grads.items()}
    num = numerical_gradient(lambda: net.objective(X, y), X, h)
    errors = {"input": float(relative_error(net.input_grad, num).max())}
    for gid, param in net.parameters().items():
        num = numerical_gradient(lambda: net.objective(X, y), param, h)
        errors[gid] = float(relative_error(grads[gid], num).max()) if param.size else 0.0
    return errors
