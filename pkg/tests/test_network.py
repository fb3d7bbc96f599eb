import math

import numpy as np
import pytest

import gradsuite
from kafnets.exceptions import ConfigError, NumericError
from kafnets.layers import Dense, Dropout, Softmax, he_uniform
from kafnets.network import (
    Network,
    build_layers,
    count_parameters,
    load_model,
    loss_eval,
    make_activation,
    network_from_dict,
    network_to_dict,
    save_model,
)


def test_identity_dense():
    d = Dense(3, 3)
    d.params["W"][...] = np.eye(3)
    d.params["b"][...] = 0.0
    x = np.random.default_rng(0).normal(size=(5, 3))
    np.testing.assert_array_equal(Network([d], loss="squared").forward(x), x)


def test_softmax_symmetric_logits():
    np.testing.assert_array_equal(Softmax(2).forward(np.zeros((1, 2))), [[0.5, 0.5]])


def test_two_layer_tanh_matches_composition(rng):
    layers = build_layers([{"type": "dense", "units": 6, "activation": "tanh"}], 4, 3, "identity", rng)
    net = Network(layers, loss="squared")
    x = rng.normal(size=(10, 4))
    W1, b1 = layers[0].params["W"], layers[0].params["b"]
    W2, b2 = layers[2].params["W"], layers[2].params["b"]
    oracle = np.array([[sum(math.tanh(sum(xi[k] * W1[k, j] for k in range(4)) + b1[j]) * W2[j, o] for j in range(6)) + b2[o]
                        for o in range(3)] for xi in x])
    np.testing.assert_allclose(net.forward(x), oracle, rtol=0, atol=1e-12)


def test_he_uniform_bound(rng):
    w = he_uniform(rng, 50, (50, 400))
    bound = math.sqrt(6 / 50)
    assert np.abs(w).max() <= bound
    assert np.abs(w).max() > 0.95 * bound


def test_zero_weight_net_only_output_bias_moves(rng):
    layers = build_layers([{"type": "dense", "units": 4, "activation": "tanh"}], 3, 2, "identity", rng)
    for layer in layers:
        for p in layer.params.values():
            p[...] = 0.0
    net = Network(layers, loss="squared")
    _, grads = net.loss_and_grad(rng.normal(size=(8, 3)), np.zeros((8, 2)))
    for g in grads.values():
        assert not g.any()
    # a nonzero target only reaches the output bias
    _, grads = net.loss_and_grad(rng.normal(size=(8, 3)), np.ones((8, 2)))
    assert grads["2.b"].all()
    assert not any(grads[g].any() for g in ("0.W", "0.b", "2.W"))


@pytest.mark.parametrize("label,spec", gradsuite.FAMILIES, ids=[f[0] for f in gradsuite.FAMILIES])
def test_network_gradients(label, spec):
    assert gradsuite.max_error(gradsuite.make_single(spec)) <= 1e-5
    assert gradsuite.max_error(gradsuite.make_network(spec)) <= 1e-5


@pytest.mark.parametrize("loss,head,n_out", [("cross_entropy_softmax", "softmax", 3), ("binary_cross_entropy", "sigmoid", 1)])
def test_fused_head_gradients(loss, head, n_out, rng):
    from kafnets.gradcheck import check_network

    layers = build_layers([{"type": "dense", "units": 5, "activation": {"name": "kaf", "D": 10}}], 3, n_out, head, rng)
    net = Network(layers, loss=loss, C=1e-3)
    X = rng.uniform(-1, 1, (50, 3))
    y = rng.integers(0, max(n_out, 2), 50)
    assert max(check_network(net, X, y).values()) <= 1e-5


def test_l2_gradient_adds_2Cw(rng):
    def grads(C):
        layers = build_layers([{"type": "dense", "units": 4, "activation": "prelu"}], 3, 2, "identity",
                              np.random.default_rng(5))
        net = Network(layers, loss="squared", C=C)
        return net, net.loss_and_grad(X, y, training=False)[1]

    X, y = rng.normal(size=(20, 3)), rng.normal(size=(20, 2))
    C = 0.01
    net, g1 = grads(C)
    _, g0 = grads(0.0)
    np.testing.assert_allclose(g1["0.W"] - g0["0.W"], 2 * C * net.parameters()["0.W"], atol=1e-15)
    # biases and PReLU slopes are exempt
    for gid in ("0.b", "1.alpha", "2.b"):
        np.testing.assert_array_equal(g1[gid], g0[gid])


def test_l1_override_and_group_resolution(rng):
    layers = build_layers([{"type": "dense", "units": 4, "activation": "kaf"}], 3, 2, "softmax", rng)
    net = Network(layers, C=0.0, overrides={"kaf": {"kind": "l1", "C": 1e-3}})
    assert net.groups["1.alpha"][2:] == ("l1", 1e-3)
    assert net.groups["0.W"][2:] == ("l2", 0.0)
    assert net.groups["0.b"][2] == "none"
    with pytest.raises(ConfigError):
        Network(build_layers([{"type": "dense", "units": 4, "activation": "apl"}], 3, 2, "softmax", rng),
                overrides={"apl": {"kind": "l1"}})


def test_every_parameter_in_one_group(rng):
    arch = [{"type": "dense", "units": 4, "activation": "srelu"}, {"type": "maxout", "units": 3, "variant": "lp_unit"},
            {"type": "dense", "units": 4, "activation": {"name": "saf"}}]
    net = Network(build_layers(arch, 3, 2, "softmax", rng))
    owned = [id(p) for layer in net.layers for p in layer.params.values()]
    assert sorted(owned) == sorted(id(p) for p in net.parameters().values())


def test_softmax_rows(rng):
    p = Softmax(5).forward(rng.normal(0, 20, (100, 5)))
    assert np.abs(p.sum(axis=1) - 1).max() <= 1e-12
    assert (p > 0).all()


def test_dropout_modes(rng):
    x = rng.normal(size=(50, 10))
    np.testing.assert_array_equal(Dropout(10, 0.5).forward(x, training=False), Dropout(10, 0.0).forward(x, training=True))
    d = Dropout(10, 0.5)
    d.rng = np.random.default_rng(0)
    out = d.forward(np.ones((2000, 10)), training=True)
    assert set(np.unique(out)) <= {0.0, 2.0}
    assert abs(out.mean() - 1.0) < 0.02
    with pytest.raises(ConfigError):
        Dropout(10, 1.0)


def test_losses():
    assert loss_eval("cross_entropy_softmax", np.array([1, 0]), np.array([[0.0, 1.0], [1.0, 0.0]])) == 0.0
    assert loss_eval("cross_entropy_softmax", np.array([0]), np.array([[0.5, 0.5]])) == pytest.approx(math.log(2), abs=1e-15)
    assert loss_eval("binary_cross_entropy", np.array([1.0]), np.array([0.5])) == pytest.approx(math.log(2), abs=1e-15)
    assert loss_eval("squared", np.ones((3, 2)), np.ones((3, 2))) == 0.0
    assert loss_eval("cross_entropy_softmax", np.array([0]), np.array([[0.0, 1.0]])) == pytest.approx(-math.log(1e-12))
    with pytest.raises(ConfigError):
        loss_eval("hinge", [0], [[1.0]])


def test_non_finite_names_layer():
    layers = build_layers([{"type": "dense", "units": 2, "activation": "identity"}], 2, 2, "identity")
    net = Network(layers, loss="squared")
    with pytest.raises(NumericError, match="layer 0"):
        net.forward(np.array([[np.inf, 0.0]]))


def test_shape_chain_checked():
    with pytest.raises(ConfigError):
        Network([Dense(3, 4), Dense(5, 2)])
    with pytest.raises(ConfigError):
        Network([Dense(3, 4)]).forward(np.zeros((2, 5)))


def _susy(hidden, n_layers):
    arch = [{"type": "dense", "units": 300, "activation": hidden} for _ in range(n_layers)]
    return count_parameters(Network(build_layers(arch, 18, 1, "sigmoid", np.random.default_rng(0)),
                                     loss="binary_cross_entropy"))["total"]


@pytest.mark.parametrize("hidden,n_layers,expected", [
    ("relu", 5, 367201),
    ("prelu", 5, 368701),
    ({"name": "apl", "S": 3}, 1, 7801),
    ({"name": "apl", "S": 3}, 2, 99901),
    ({"name": "kaf", "D": 20}, 1, 12001),
    ({"name": "kaf", "D": 20}, 2, 108301),
    ({"name": "kaf2d", "D": 10}, 1, 20851),
    ({"name": "kaf2d", "D": 10}, 2, 81151),
])
def test_parameter_counts(hidden, n_layers, expected):
    assert _susy(hidden, n_layers) == expected


def test_count_formulas(rng):
    net = Network(build_layers([{"type": "maxout", "units": 7, "K": 3},
                                {"type": "dense", "units": 6, "activation": {"name": "saf", "T": 11}}], 4, 2, "softmax", rng))
    per = [item["params"] for item in count_parameters(net)["layers"]]
    assert per == [3 * 4 * 7 + 3 * 7, 7 * 6 + 6, 11 * 6, 6 * 2 + 2, 0]


def test_make_activation_unknown():
    with pytest.raises(ConfigError):
        make_activation("gelu", 3)
    with pytest.raises(ConfigError):
        make_activation({"name": "kaf", "bogus": 1}, 3)


def test_model_round_trip(tmp_path, rng):
    arch = [{"type": "dense", "units": 4, "activation": {"name": "kaf", "init": "krr:elu"}},
            {"type": "dropout", "p": 0.3},
            {"type": "dense", "units": 4, "activation": {"name": "saf", "basis": "bspline"}},
            {"type": "maxout", "units": 4, "variant": "lp_unit"},
            {"type": "dense", "units": 4, "activation": {"name": "kaf2d", "D": 5}},
            {"type": "dense", "units": 3, "activation": "srelu"}]
    net = Network(build_layers(arch, 3, 3, "softmax", rng), C=1e-3, overrides={"kaf": {"kind": "l1"}})
    for p in net.parameters().values():
        p += rng.normal(0, 1e-3, p.shape)
    path = tmp_path / "m.json"
    save_model(path, net, note="x")
    back, doc = load_model(path)
    assert doc["note"] == "x" and doc["format_version"] == 1
    for gid, p in net.parameters().items():
        np.testing.assert_array_equal(back.parameters()[gid], p)
    assert back.groups == net.groups
    X = rng.normal(size=(7, 3))
    np.testing.assert_array_equal(back.forward(X), net.forward(X))
    np.testing.assert_array_equal(back.layers[0 + 1].initial_alpha, net.layers[1].initial_alpha)
    doc = network_to_dict(net)
    doc["format_version"] = 99
    with pytest.raises(ConfigError):
        network_from_dict(doc)
