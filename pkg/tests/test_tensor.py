import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays, array_shapes

from swishnet.core.error_codes import ErrorCode
from swishnet.core.exceptions import DimensionError
from swishnet.tensor import Precision, add_bias, argmax_rows, as_tensor, matmul, transpose2d


def test_matmul_identity_returns_operand():
    a = np.array([[1.5, -2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(matmul(np.eye(2), a), a)


def test_matmul_hand_summation():
    out = matmul(np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([[1.0], [1.0]]))
    np.testing.assert_array_equal(out, [[3.0], [7.0]])


def test_matmul_zeros():
    out = matmul(np.zeros((3, 4)), np.arange(8.0).reshape(4, 2))
    assert out.shape == (3, 2)
    assert not out.any()


def test_matmul_inner_mismatch_names_both_shapes():
    with pytest.raises(DimensionError) as exc:
        matmul(np.zeros((2, 3)), np.zeros((2, 3)))
    assert exc.value.error_code == ErrorCode.DIMENSION_MISMATCH.value
    assert "[2, 3]" in exc.value.message


def test_matmul_rejects_rank_one():
    with pytest.raises(DimensionError) as exc:
        matmul(np.zeros(3), np.zeros((3, 1)))
    assert exc.value.error_code == ErrorCode.RANK_MISMATCH.value


def test_add_bias_examples():
    z = np.array([[1.0, 1.0], [2.0, 2.0]])
    np.testing.assert_array_equal(add_bias(z, np.array([10.0, 20.0])), [[11.0, 21.0], [12.0, 22.0]])
    np.testing.assert_array_equal(add_bias(np.zeros((1, 2)), np.array([1.0, 2.0])), [[1.0, 2.0]])
    np.testing.assert_array_equal(add_bias(z, np.zeros(2)), z)


def test_add_bias_width_mismatch():
    with pytest.raises(DimensionError):
        add_bias(np.zeros((2, 3)), np.zeros(2))


@pytest.mark.parametrize(
    "rows, expected",
    [
        ([[0.1, 0.9]], [1]),
        ([[0.5, 0.5]], [0]),
        ([[3.0, 1.0, 2.0], [0.0, 0.0, 7.0]], [0, 2]),
    ],
)
def test_argmax_rows(rows, expected):
    assert argmax_rows(np.array(rows)) == expected


def test_transpose_examples():
    np.testing.assert_array_equal(transpose2d(np.array([[1.0, 2.0, 3.0]])), [[1.0], [2.0], [3.0]])
    t = np.arange(6.0).reshape(2, 3)
    np.testing.assert_array_equal(transpose2d(transpose2d(t)), t)
    assert transpose2d(t).flags["C_CONTIGUOUS"]


def test_as_tensor_precision_and_shape():
    t = as_tensor(range(6), Precision.DOUBLE, shape=(2, 3))
    assert t.dtype == np.float64
    assert t.shape == (2, 3)
    assert as_tensor([1, 2]).dtype == np.float32
    assert Precision.of(t) is Precision.DOUBLE


def test_as_tensor_rejects_wrong_element_count():
    with pytest.raises(DimensionError):
        as_tensor(range(5), shape=(2, 3))


finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
matrices = arrays(np.float64, array_shapes(min_dims=2, max_dims=2, max_side=8), elements=finite)


@given(matrices)
def test_matmul_by_identity_is_exact(a):
    np.testing.assert_array_equal(matmul(a, np.eye(a.shape[1])), a)


@given(matrices)
def test_transpose_is_an_involution(t):
    np.testing.assert_array_equal(transpose2d(transpose2d(t)), t)


@given(matrices, st.floats(min_value=-100, max_value=100, allow_nan=False))
def test_argmax_ignores_row_shifts(t, c):
    # exact ties can break differently once the shift rounds
    t = np.round(t, 1) + np.arange(t.shape[1]) * 1e-3
    assert list(argmax_rows(t + c)) == list(argmax_rows(t))
