import numpy as np
import pytest

from kafnets.activations.parametric import (
    ParametricActivation,
    eval_parametric,
    grad_parametric,
    regularization_exempt,
)
from kafnets.gradcheck import relative_error

PARAMS = {
    "gen_tanh": {"a": 1.3, "b": 0.7},
    "prelu": {"alpha": 0.25},
    "pelu": {"alpha": 1.2, "beta": 0.8},
    "srelu": {"tr": 1.0, "ar": 2.0, "tl": -1.0, "al": 0.1},
    "beta_swish": {"beta": 1.5},
}
KINKS = {"prelu": [0.0], "srelu": [1.0, -1.0], "pelu": [0.0]}


def test_gen_tanh_reduces_to_tanh():
    s = np.linspace(-5, 5, 101)
    np.testing.assert_allclose(eval_parametric("gen_tanh", s, a=1.0, b=2.0), np.tanh(s), atol=1e-15)


def test_examples():
    assert eval_parametric("prelu", -2.0, alpha=0.25) == -0.5
    srelu = {"tr": 1.0, "ar": 2.0, "tl": -1.0, "al": 0.0}
    assert eval_parametric("srelu", 0.0, **srelu) == 0.0
    assert eval_parametric("srelu", 2.0, **srelu) == 3.0


def test_prelu_alpha_derivative():
    assert grad_parametric("prelu", 3.0, alpha=0.25)[1]["alpha"] == 0.0
    assert grad_parametric("prelu", -2.0, alpha=0.25)[1]["alpha"] == -2.0


def test_beta_swish_zero_beta_is_half_identity(rng):
    s = rng.normal(size=20)
    np.testing.assert_allclose(grad_parametric("beta_swish", s, beta=0.0)[0], 0.5)
    np.testing.assert_allclose(eval_parametric("beta_swish", s, beta=0.0), s / 2)


@pytest.mark.parametrize("kind", sorted(PARAMS))
def test_finite_differences(kind, rng):
    p = PARAMS[kind]
    s = rng.uniform(-4, 4, 100)
    for k in KINKS.get(kind, []):
        s = s[np.abs(s - k) > 1e-3]
    h = 1e-6
    ds, dp = grad_parametric(kind, s, **p)
    num = (eval_parametric(kind, s + h, **p) - eval_parametric(kind, s - h, **p)) / (2 * h)
    assert relative_error(ds, num).max() < 1e-5
    for name, value in p.items():
        up = eval_parametric(kind, s, **{**p, name: value + h})
        down = eval_parametric(kind, s, **{**p, name: value - h})
        assert relative_error(dp[name], (up - down) / (2 * h)).max() < 1e-5, name


def test_prelu_special_cases(rng):
    s = rng.normal(size=1000)
    np.testing.assert_array_equal(eval_parametric("prelu", s, alpha=0.0), np.maximum(s, 0))
    np.testing.assert_array_equal(eval_parametric("prelu", s, alpha=1.0), s)


def test_srelu_continuity():
    p = PARAMS["srelu"]
    for t in (p["tr"], p["tl"]):
        left = eval_parametric("srelu", np.nextafter(t, -np.inf), **p)
        right = eval_parametric("srelu", np.nextafter(t, np.inf), **p)
        assert abs(left - right) < 1e-12


@pytest.mark.parametrize("kind,bad", [("gen_tanh", {"a": -1.0, "b": 1.0}), ("pelu", {"alpha": 1.0, "beta": 0.0}),
                                      ("srelu", {"tr": -1.0, "ar": 1.0, "tl": 1.0, "al": 0.1})])
def test_domain_errors(kind, bad):
    with pytest.raises(ValueError):
        eval_parametric(kind, 0.5, **bad)


def test_regularization_policy():
    assert regularization_exempt("prelu") and regularization_exempt("srelu")
    assert not regularization_exempt("pelu") and not regularization_exempt("gen_tanh")


def test_layer_per_neuron_parameters_and_clamp(rng):
    layer = ParametricActivation(4, "pelu", rng=rng)
    assert layer.params["alpha"].shape == (4,)
    layer.params["alpha"][0] = -3.0
    layer.constrain()
    assert layer.params["alpha"][0] == pytest.approx(1e-4)
    prelu = ParametricActivation(3, "prelu", rng=rng)
    np.testing.assert_array_equal(prelu.params["alpha"], 0.25)
    assert prelu.penalty["alpha"] == "none"
