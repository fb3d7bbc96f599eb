"""Non-parametric activations: APL, polynomial, spline and maxout units.

The functional forms take per-unit parameters along a trailing axis, so the
same code evaluates one neuron on a scalar or a whole layer on a batch.
"""
import math
import warnings

import numpy as np

from ..exceptions import ConfigError
from ..layers import ElementwiseActivation, Layer, he_uniform
from ..numeric import make_rng
from .fixed import DEFAULTS as FIXED_DEFAULTS
from .fixed import eval_fixed


def _scalarize(x):
    return x[()] if np.ndim(x) == 0 else x


# ---------------------------------------------------------------- APL ----

def apl_eval(s, a, b):
    """max(0, s) + sum_i a_i max(0, b_i - s); ``a``/``b`` on the last axis."""
    s = np.asarray(s, dtype=np.float64)
    hinge = np.maximum(0.0, b - s[..., None])
    return _scalarize(np.maximum(s, 0.0) + (a * hinge).sum(axis=-1))


def apl_grad(s, a, b):
    s = np.asarray(s, dtype=np.float64)
    gap = b - s[..., None]
    active = (gap > 0).astype(np.float64)
    ds = (s > 0).astype(np.float64) - (a * active).sum(axis=-1)
    return _scalarize(ds), np.maximum(0.0, gap), a * active


class APL(ElementwiseActivation):
    """Adaptive piecewise-linear unit with ``S`` hinges per neuron.

    Any continuous piecewise-linear h is reachable provided h(s) = s beyond
    some point on the right and h has constant slope beyond some point on
    the left.  The hinge parameters always take an l2 penalty: an l1 term
    is never applied to them.
    """

    family = "apl"
    name = "apl"

    def __init__(self, n_units, S=3, rng=None):
        if S < 1:
            raise ConfigError("apl requires S >= 1")
        super().__init__(n_units)
        rng = make_rng(rng)
        self.S = int(S)
        self.add_param("a", rng.normal(0.0, 0.15, (n_units, self.S)), penalty="l2")
        self.add_param("b", rng.normal(0.0, 0.5, (n_units, self.S)), penalty="l2")

    def _value(self, s):
        return apl_eval(s, self.params["a"], self.params["b"])

    def _derivatives(self, s):
        ds, da, db = apl_grad(s, self.params["a"], self.params["b"])
        return ds, {"a": da, "b": db}

    def hyperparameters(self):
        return {"S": self.S}


# ---------------------------------------------------------------- PAF ----

MAX_PAF_DEGREE = 9


def paf_eval(s, coef):
    """Polynomial sum_i coef_i s^i by Horner's rule (coef on the last axis)."""
    s = np.asarray(s, dtype=np.float64)
    coef = np.asarray(coef, dtype=np.float64)
    out = np.zeros(np.broadcast_shapes(s.shape, coef.shape[:-1]))
    for i in range(coef.shape[-1] - 1, -1, -1):
        out = out * s + coef[..., i]
    return _scalarize(out)


def paf_grad(s, coef):
    s = np.asarray(s, dtype=np.float64)
    coef = np.asarray(coef, dtype=np.float64)
    degree = coef.shape[-1] - 1
    powers = s[..., None] ** np.arange(degree + 1)
    deriv = coef[..., 1:] * np.arange(1, degree + 1)
    ds = paf_eval(s, deriv) if degree > 0 else np.zeros_like(s)
    return _scalarize(np.asarray(ds)), powers


class PAF(ElementwiseActivation):
    """Polynomial activation of degree ``P``, initialized to the identity.

    Coefficients act globally and outputs grow like |s|^P, so ``P`` is capped
    at 9; non-finite outputs are reported by the network.
    """

    family = "paf"
    name = "paf"

    def __init__(self, n_units, P=3, rng=None):
        if not 1 <= P <= MAX_PAF_DEGREE:
            raise ConfigError(f"paf degree must lie in [1, {MAX_PAF_DEGREE}], got {P}")
        if P > 5:
            warnings.warn(f"paf degree {P} may overflow for large activations", RuntimeWarning, stacklevel=2)
        super().__init__(n_units)
        self.P = int(P)
        coef = np.zeros((n_units, self.P + 1))
        coef[:, 1] = 1.0
        self.add_param("coef", coef)

    def _value(self, s):
        return paf_eval(s, self.params["coef"])

    def _derivatives(self, s):
        ds, powers = paf_grad(s, self.params["coef"])
        return ds, {"coef": powers}

    def hyperparameters(self):
        return {"P": self.P}


# ---------------------------------------------------------------- SAF ----

CATMULL_ROM = 0.5 * np.array(
    [
        [-1.0, 3.0, -3.0, 1.0],
        [2.0, -5.0, 4.0, -1.0],
        [-1.0, 0.0, 1.0, 0.0],
        [0.0, 2.0, 0.0, 0.0],
    ]
)

B_BASIS = np.array(
    [
        [-1.0, 3.0, -3.0, 1.0],
        [3.0, -6.0, 3.0, 0.0],
        [-3.0, 0.0, 3.0, 0.0],
        [1.0, 4.0, 1.0, 0.0],
    ]
) / 6.0

BASES = {"catmull_rom": CATMULL_ROM, "bspline": B_BASIS}


def saf_grid(T, dx):
    """Knot abscissae: ``T`` points with step ``dx`` symmetric around 0."""
    if T < 4:
        raise ConfigError("saf needs at least 4 knots")
    if dx <= 0:
        raise ConfigError("saf sampling step must be positive")
    return (np.arange(T) - (T - 1) / 2.0) * dx


def saf_locate(s, T, dx):
    """Return ``(k, u)``: the span starts at knot ``k - 1`` and ``u`` is the
    normalized abscissa inside the segment [x_k, x_{k+1}].

    For an odd number of knots, u equals s/dx - floor(s/dx).  Outside the
    grid the span index is clamped and u leaves [0, 1].
    """
    s = np.asarray(s, dtype=np.float64)
    z = s / dx + (T - 1) / 2.0
    k = np.clip(np.floor(z), 1, T - 3).astype(np.intp)
    return k, z - k


def _span_weights(u, basis):
    u = np.asarray(u)
    powers = np.stack([u**3, u**2, u, np.ones_like(u)], axis=-1)
    dpowers = np.stack([3 * u**2, 2 * u, np.ones_like(u), np.zeros_like(u)], axis=-1)
    return powers @ basis, dpowers @ basis


def _gather_span(q, k):
    idx = k[..., None] + np.arange(-1, 3)
    return np.take_along_axis(np.broadcast_to(q, k.shape + q.shape[-1:]), idx, axis=-1), idx


def saf_eval(s, q, dx, basis="catmull_rom"):
    """Spline activation u^T B q_k; knots ``q`` on the last axis."""
    q = np.asarray(q, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    k, u = saf_locate(s, q.shape[-1], dx)
    k, u = np.broadcast_arrays(k, u, np.empty(q.shape[:-1]))[:2]
    span, _ = _gather_span(q, k)
    w, _ = _span_weights(u, BASES[basis])
    return _scalarize((w * span).sum(axis=-1))


def saf_grad(s, q, dx, basis="catmull_rom"):
    """Return ``(dg/ds, dg/dq)``; dg/dq is dense over the knots but only the
    four entries of the active span are nonzero."""
    q = np.asarray(q, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    k, u = saf_locate(s, q.shape[-1], dx)
    k, u = np.broadcast_arrays(k, u, np.empty(q.shape[:-1]))[:2]
    span, idx = _gather_span(q, k)
    w, dw = _span_weights(u, BASES[basis])
    ds = (dw * span).sum(axis=-1) / dx
    dq = np.zeros(k.shape + q.shape[-1:])
    np.put_along_axis(dq, idx, w, axis=-1)
    return _scalarize(ds), dq


class SAF(ElementwiseActivation):
    """Cubic spline activation over ``T`` knots spaced ``dx`` apart.

    Knots start as samples of a fixed activation (``init``) and are
    penalized for drifting away from those starting values.
    """

    family = "saf"
    name = "saf"

    def __init__(self, n_units, T=21, dx=0.2, basis="catmull_rom", init="tanh", rng=None):
        if basis not in BASES:
            raise ConfigError(f"unknown spline basis {basis!r}; expected one of {sorted(BASES)}")
        if init not in FIXED_DEFAULTS:
            raise ConfigError(f"saf init must name a fixed activation, got {init!r}")
        super().__init__(n_units)
        self.T, self.dx, self.basis, self.init = int(T), float(dx), basis, init
        grid = saf_grid(self.T, self.dx)
        self.add_param("q", np.tile(eval_fixed(init, grid), (n_units, 1)), penalty="deviation")

    def _value(self, s):
        return saf_eval(s, self.params["q"], self.dx, self.basis)

    def _derivatives(self, s):
        ds, dq = saf_grad(s, self.params["q"], self.dx, self.basis)
        return ds, {"q": dq}

    def hyperparameters(self):
        return {"T": self.T, "dx": self.dx, "basis": self.basis, "init": self.init}


# ------------------------------------------------------------- maxout ----

MAXOUT_VARIANTS = ("max", "soft", "lp", "lp_unit")


def effective_p(p_raw):
    """Lp-unit exponent 1 + log(1 + exp(p_raw)), always > 1."""
    return 1.0 + np.logaddexp(0.0, p_raw)


def _pnorm(r, p, mean):
    """(agg_i |r_i|^p)^(1/p) and its derivatives, rescaled by max|r| so that
    large exponents do not overflow.  ``r`` has the K maps on the last axis."""
    absr = np.abs(r)
    m = absr.max(axis=-1, keepdims=True)
    safe_m = np.where(m > 0, m, 1.0)
    a = absr / safe_m
    pk = p[..., None]
    ap = a**pk
    total = ap.sum(axis=-1)
    if mean:
        total = total / r.shape[-1]
    g = m[..., 0] * total ** (1.0 / p)
    zero = m[..., 0] == 0
    # d g / d r_i = agg' * a_i^(p-1) * total^(1/p - 1) * sign(r_i)
    scale = 1.0 / r.shape[-1] if mean else 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        dr = scale * a ** (pk - 1.0) * (total ** (1.0 / p - 1.0))[..., None] * np.sign(r)
        logr = np.where(absr > 0, np.log(np.where(absr > 0, absr, 1.0)), 0.0)
        weights = ap / ap.sum(axis=-1, keepdims=True)
        dp = (g / p) * ((weights * logr).sum(axis=-1) - (np.log(safe_m[..., 0]) + np.log(total) / p))
    dr = np.where(zero[..., None], 0.0, dr)
    dp = np.where(zero, 0.0, dp)
    return g, dr, dp


def maxout_reduce(s, variant="max", p=None, c=None, p_raw=None):
    """Reduce K affine maps (last axis of ``s``) to one output.

    Returns ``(g, dg/ds, extras)`` where ``extras`` holds dg/dc and
    dg/dp_raw for the Lp unit.
    """
    s = np.asarray(s, dtype=np.float64)
    K = s.shape[-1]
    if variant == "max":
        idx = np.argmax(s, axis=-1)  # ties -> lowest index
        ds = (np.arange(K) == idx[..., None]).astype(np.float64)
        return np.take_along_axis(s, idx[..., None], axis=-1)[..., 0], ds, {}
    if variant == "soft":
        m = s.max(axis=-1, keepdims=True)
        e = np.exp(s - m)
        tot = e.sum(axis=-1, keepdims=True)
        return (m + np.log(tot))[..., 0], e / tot, {}
    if variant == "lp":
        if p is None or p < 1 or int(p) != p:
            raise ValueError("lp-maxout needs a natural exponent p >= 1")
        if p == 1:
            return np.abs(s).sum(axis=-1), np.sign(s), {}
        g, dr, _ = _pnorm(s, np.full(s.shape[:-1], float(p)), mean=False)
        return g, dr, {}
    if variant == "lp_unit":
        c = np.zeros(K) if c is None else np.asarray(c, dtype=np.float64)
        p_raw = np.asarray(p_raw, dtype=np.float64)
        pe = np.broadcast_to(effective_p(p_raw), s.shape[:-1])
        g, dr, dp = _pnorm(s - c, pe, mean=True)
        dp_raw = dp * np.broadcast_to(1.0 / (1.0 + np.exp(-p_raw)), dp.shape)
        return g, dr, {"c": -dr, "p_raw": dp_raw}
    raise ValueError(f"unknown maxout variant {variant!r}")


def maxout_eval(h, W, b, variant="max", p=None, c=None, p_raw=None):
    """Single maxout unit: ``W`` is (K, n_in), ``b`` is (K,), ``h`` is (n_in,)
    or a batch (B, n_in)."""
    s = np.asarray(h, dtype=np.float64) @ np.asarray(W, dtype=np.float64).T + b
    return _scalarize(maxout_reduce(s, variant, p, c, p_raw)[0])


def maxout_grad(h, W, b, variant="max", p=None, c=None, p_raw=None):
    """Gradients of a single maxout unit on one input vector ``h``.

    Returns a dict with keys ``h``, ``W``, ``b`` and, for the Lp unit,
    ``c`` and ``p_raw``.
    """
    h = np.asarray(h, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    s = W @ h + b
    _, ds, extras = maxout_reduce(s, variant, p, c, p_raw)
    out = {"h": ds @ W, "W": np.outer(ds, h), "b": ds}
    out.update(extras)
    return out


class Maxout(Layer):
    """Maxout layer: replaces a dense layer plus its activation.

    Each of the ``units`` outputs reduces K affine maps of the layer input
    with one of the variants ``max``, ``soft`` (log-sum-exp), ``lp``
    (l_p norm with natural ``p``) or ``lp_unit`` (learned centers and
    exponent).  The max variant is convex in its input.
    """

    family = "maxout"

    def __init__(self, n_in, units, K=5, variant="max", p=2, rng=None):
        if K < 1:
            raise ConfigError("maxout requires K >= 1")
        if variant not in MAXOUT_VARIANTS:
            raise ConfigError(f"unknown maxout variant {variant!r}; expected one of {MAXOUT_VARIANTS}")
        if variant == "lp" and (p < 1 or int(p) != p):
            raise ConfigError("lp-maxout needs a natural exponent p >= 1")
        super().__init__(n_in, units)
        rng = make_rng(rng)
        self.K, self.variant, self.p = int(K), variant, int(p)
        self.add_param("W", he_uniform(rng, n_in, (self.K, n_in, units)))
        self.add_param("b", np.zeros((self.K, units)), penalty="none")
        if variant == "lp_unit":
            self.add_param("c", np.zeros((units, self.K)), penalty="none")
            # effective exponent starts at 2
            self.add_param("p_raw", np.full(units, math.log(math.e - 1.0)), penalty="none")
        self._x = None
        self._ds = None
        self._extras = None

    def forward(self, x, training=False):
        self._x = x
        s = np.einsum("bi,kiu->buk", x, self.params["W"]) + self.params["b"].T
        g, self._ds, self._extras = maxout_reduce(
            s, self.variant, self.p, self.params.get("c"), self.params.get("p_raw")
        )
        return g

    def backward(self, grad):
        gs = grad[..., None] * self._ds  # (B, units, K)
        self.grads["W"] = np.einsum("bi,buk->kiu", self._x, gs)
        self.grads["b"] = gs.sum(axis=0).T
        if self.variant == "lp_unit":
            self.grads["c"] = (grad[..., None] * self._extras["c"]).sum(axis=0)
            self.grads["p_raw"] = (grad * self._extras["p_raw"]).sum(axis=0)
        return np.einsum("buk,kiu->bi", gs, self.params["W"])

    def get_config(self):
        cfg = {"type": "maxout", "n_in": self.n_in, "units": self.n_out, "K": self.K, "variant": self.variant}
        if self.variant == "lp":
            cfg["p"] = self.p
        return cfg
