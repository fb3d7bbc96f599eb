import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kafnets.exceptions import ShapeMismatchError
from kafnets.numeric import elementwise, make_rng, matmul, rand_normal


def test_matmul_identity():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(matmul(np.eye(2), m), m)


def test_matmul_hand_arithmetic():
    np.testing.assert_array_equal(matmul([[1.0, 2.0]], [[3.0], [4.0]]), [[11.0]])


def test_matmul_zero():
    np.testing.assert_array_equal(matmul(np.zeros((2, 3)), np.arange(12.0).reshape(3, 4)), np.zeros((2, 4)))


def test_matmul_mismatch_names_both_shapes():
    with pytest.raises(ShapeMismatchError, match=r"2x3.*2x2"):
        matmul(np.zeros((2, 3)), np.zeros((2, 2)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_matmul_associative_and_transpose(seed):
    rng = np.random.default_rng(seed)
    a, b, c = rng.normal(size=(3, 4)), rng.normal(size=(4, 5)), rng.normal(size=(5, 2))
    left, right = matmul(matmul(a, b), c), matmul(a, matmul(b, c))
    assert np.all(np.abs(left - right) <= 1e-9 * np.maximum(1.0, np.abs(right)))
    np.testing.assert_allclose(matmul(a, b).T, matmul(b.T, a.T), atol=1e-12)


def test_elementwise():
    np.testing.assert_array_equal(elementwise([[1.0, -2.0]], lambda v: -v), [[-1.0, 2.0]])
    x = np.array([[0.5, 1.5], [2.0, -3.0]])
    np.testing.assert_array_equal(elementwise(x, lambda v: v), x)
    assert elementwise([[0.0]], np.exp)[0, 0] == 1.0


def test_rand_normal_degenerate_and_deterministic():
    np.testing.assert_array_equal(rand_normal(make_rng(0), 3, 2, mean=1.5, std=0.0), np.full((3, 2), 1.5))
    np.testing.assert_array_equal(rand_normal(make_rng(7), 4, 4), rand_normal(make_rng(7), 4, 4))
    assert make_rng(7).bytes(64) == make_rng(7).bytes(64)


def test_rand_normal_moments():
    x = rand_normal(make_rng(3), 100_000, 1)
    assert abs(x.mean()) < 0.02
    assert abs(x.var() - 1.0) < 0.05


def test_rand_normal_negative_std():
    with pytest.raises(ValueError):
        rand_normal(make_rng(0), 1, 1, std=-1.0)
