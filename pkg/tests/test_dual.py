import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rbdhess import dual as dl
from rbdhess.dual import Dual

floats = st.floats(-3, 3)


def test_tangent_shape_is_validated():
    with pytest.raises(ValueError):
        Dual(np.zeros(3), np.zeros((2, 4)))


@given(floats, floats)
def test_product_rule(a, b):
    x = Dual(a, [1.0])
    y = Dual(b, [0.0])
    z = x * x * y + 3 * x
    assert np.isclose(z.re, a * a * b + 3 * a)
    assert np.isclose(z.du[0], 2 * a * b + 3)


@given(floats)
def test_trig_derivatives(a):
    x = Dual(a, [1.0])
    assert np.isclose(dl.sin(x).du[0], np.cos(a))
    assert np.isclose(dl.cos(x).du[0], -np.sin(a))


@given(st.floats(0.1, 5))
def test_sqrt_and_division(a):
    x = Dual(a, [1.0])
    assert np.isclose(dl.sqrt(x).du[0], 0.5 / np.sqrt(a))
    assert np.isclose((1.0 / x).du[0], -1 / a**2)


def test_matmul_carries_multiple_directions():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((3, 3))
    x = dl.seed(rng.standard_normal(3))
    y = A @ x
    assert y.du.shape == (3, 3)
    # tangent k of A x along e_k is column k of A
    assert np.allclose(y.du, A.T)
    J = (x @ x).du
    assert np.allclose(J, 2 * x.re)


def test_matrix_matrix_product_rule():
    rng = np.random.default_rng(2)
    A = Dual(rng.standard_normal((2, 3)), rng.standard_normal((4, 2, 3)))
    B = Dual(rng.standard_normal((3, 2)), rng.standard_normal((4, 3, 2)))
    C = A @ B
    assert np.allclose(C.du, A.du @ B.re + A.re @ B.du)


def test_setitem_promotes_plain_target_values():
    like = Dual(np.zeros(1), np.zeros((2, 1)))
    Z = dl.zeros((2, 2), like=like)
    Z[0, :] = Dual(np.array([1.0, 2.0]), np.array([[1.0, 0], [0, 1.0]]))
    Z[1, 1] = 5.0
    assert np.array_equal(Z.re, [[1, 2], [0, 5]])
    assert np.array_equal(Z.du[1], [[0, 1], [0, 0]])


def test_stack_and_concatenate_mix_plain_and_dual():
    x = Dual(np.ones(2), np.ones((3, 2)))
    s = dl.stack([x, np.zeros(2)])
    assert s.shape == (2, 2) and s.du.shape == (3, 2, 2)
    assert np.array_equal(s.du[:, 1], np.zeros((3, 2)))
    c = dl.concatenate([np.zeros(1), x])
    assert c.shape == (3,) and np.array_equal(c.du[:, 0], np.zeros(3))


def test_plain_arrays_pass_through_helpers():
    a = np.arange(4.0).reshape(2, 2)
    assert isinstance(dl.stack([a, a]), np.ndarray)
    assert np.array_equal(dl.swap_last(a), a.T)
    assert dl.first_dual(a, [a, a]) is None


def test_linear_decorator_lifts_tangents():
    @dl.linear
    def double_first(x):
        return 2 * x[..., :1]

    x = Dual(np.array([1.0, 2.0]), np.array([[3.0, 4.0]]))
    y = double_first(x)
    assert np.array_equal(y.re, [2.0]) and np.array_equal(y.du, [[6.0]])
