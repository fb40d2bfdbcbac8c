import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swishnet.activations import (
    ActivationKind,
    act_derivative,
    act_forward,
    activation_curves,
    derivative_array,
    forward_array,
    sigmoid,
    sigmoid_array,
    swish_global_min,
)
from swishnet.core.error_codes import ErrorCode
from swishnet.core.exceptions import ValidationError
from swishnet.rng import numpy_generator

SELU_ALPHA = 1.67326324
SELU_LAMBDA = 1.05070098


def reference(kind: ActivationKind, x: float) -> float:
    match kind:
        case ActivationKind.RELU:
            return max(x, 0.0)
        case ActivationKind.ELU:
            return x if x > 0 else math.expm1(x)
        case ActivationKind.SELU:
            return SELU_LAMBDA * (x if x > 0 else SELU_ALPHA * math.expm1(x))
        case ActivationKind.TANH:
            return math.tanh(x)
        case ActivationKind.SWISH:
            return x / (1.0 + math.exp(-x))
        case ActivationKind.SWISHRELU:
            return x if x >= 0 else x / (1.0 + math.exp(-x))


def test_sigmoid_values():
    assert sigmoid(0.0) == 0.5
    assert sigmoid(1.0) == pytest.approx(0.7310585786, abs=1e-10)
    tiny = sigmoid(-745.0)
    assert 0.0 < tiny <= 1e-300
    assert sigmoid(745.0) == 1.0


def test_sigmoid_array_keeps_dtype_without_overflow_warnings():
    x = np.array([-1000.0, 0.0, 1000.0], dtype=np.float32)
    with np.errstate(over="raise"):
        out = sigmoid_array(x)
    assert out.dtype == np.float32
    np.testing.assert_array_equal(out, [0.0, 0.5, 1.0])


@pytest.mark.parametrize(
    "kind, x, expected",
    [
        (ActivationKind.SWISHRELU, 2.0, 2.0),
        (ActivationKind.SWISHRELU, -1.0, -0.2689414214),
        (ActivationKind.RELU, -3.0, 0.0),
        (ActivationKind.SWISH, 0.0, 0.0),
        (ActivationKind.ELU, -1.0, -0.6321205588),
        (ActivationKind.SELU, 1.0, 1.05070098),
    ],
)
def test_forward_examples(kind, x, expected):
    assert act_forward(kind, x) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize(
    "kind, x, expected",
    [
        (ActivationKind.SWISHRELU, 5.0, 1.0),
        (ActivationKind.SWISH, 0.0, 0.5),
        (ActivationKind.RELU, 0.0, 0.0),
    ],
)
def test_derivative_examples(kind, x, expected):
    assert act_derivative(kind, x) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("kind", list(ActivationKind))
def test_forward_matches_reference_on_dense_grid(kind):
    grid = np.linspace(-20.0, 20.0, 10_001)
    got = forward_array(kind, grid)
    want = np.array([reference(kind, float(x)) for x in grid])
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-12)


@pytest.mark.parametrize("kind", list(ActivationKind))
def test_derivative_matches_central_difference(kind):
    h = 1e-5
    x = numpy_generator(2024, 0xAC).uniform(-10.0, 10.0, 4_000)
    x = x[np.abs(x) >= 1e-3][:1_000]
    assert x.size == 1_000
    numeric = (forward_array(kind, x + h) - forward_array(kind, x - h)) / (2 * h)
    analytic = derivative_array(kind, x)
    rel = np.abs(analytic - numeric) / np.maximum(1.0, np.abs(analytic))
    assert rel.max() < 1e-6, f"worst at x={x[np.argmax(rel)]}"


@given(st.floats(min_value=-700.0, max_value=-1e-300, allow_nan=False))
def test_swishrelu_is_negative_for_negative_inputs(x):
    assert act_forward(ActivationKind.SWISHRELU, x) < 0.0


def test_swishrelu_monotonic_tails():
    x_star, _ = swish_global_min()
    right = forward_array(ActivationKind.SWISHRELU, np.linspace(0.0, 50.0, 10_001))
    left = forward_array(ActivationKind.SWISHRELU, np.linspace(-30.0, x_star, 10_001))
    assert np.all(np.diff(right) > 0)
    assert np.all(np.diff(left) < 0)


def test_swishrelu_continuous_at_zero():
    assert act_forward(ActivationKind.SWISHRELU, 0.0) == 0.0
    for x in (1e-8, -1e-8):
        assert abs(act_forward(ActivationKind.SWISHRELU, x)) <= 1e-8
    assert act_forward(ActivationKind.SWISHRELU, -1e-8) < 0.0 < act_forward(ActivationKind.SWISHRELU, 1e-8)


def test_swishrelu_one_sided_derivatives_at_zero():
    assert act_derivative(ActivationKind.SWISHRELU, 1e-9) == 1.0
    assert act_derivative(ActivationKind.SWISHRELU, -1e-9) == pytest.approx(0.5, abs=1e-8)
    assert act_derivative(ActivationKind.SWISHRELU, 0.0) == 1.0


def test_swishrelu_branches_are_exact():
    rng = np.random.default_rng(7)
    positive = rng.uniform(0.0, 50.0, 100_000)
    negative = -rng.uniform(1e-9, 50.0, 100_000)
    np.testing.assert_array_equal(forward_array(ActivationKind.SWISHRELU, positive), positive)
    np.testing.assert_array_equal(
        forward_array(ActivationKind.SWISHRELU, negative), forward_array(ActivationKind.SWISH, negative)
    )


@given(st.floats(min_value=-60.0, max_value=60.0, allow_nan=False))
def test_swishrelu_never_below_swish_minimum(x):
    _, f_star = swish_global_min()
    assert act_forward(ActivationKind.SWISHRELU, x) >= f_star - 1e-12


def test_swish_global_minimum():
    x_star, f_star = swish_global_min()
    assert x_star == pytest.approx(-1.2784645, abs=1e-6)
    assert f_star == pytest.approx(-0.2784645, abs=1e-6)
    grid = np.linspace(-50.0, 50.0, 1_000_000)
    assert forward_array(ActivationKind.SWISHRELU, grid).min() == pytest.approx(-0.2784645, abs=1e-4)


@pytest.mark.parametrize("kind", [k for k in ActivationKind if k is not ActivationKind.TANH])
def test_unbounded_above(kind):
    assert act_forward(kind, 100.0) >= 99.0


@pytest.mark.parametrize("kind", list(ActivationKind))
def test_zero_maps_to_zero_and_keeps_shape(kind):
    z = np.zeros((2, 3), dtype=np.float32)
    out = forward_array(kind, z)
    assert out.shape == (2, 3)
    assert out.dtype == np.float32
    assert not out.any()


def test_relu_tensor_example():
    np.testing.assert_array_equal(forward_array(ActivationKind.RELU, np.array([[-1.0, 2.0]])), [[0.0, 2.0]])


def test_derivative_is_elementwise_and_keeps_dtype():
    x = np.array([[-2.0, 0.0], [0.5, 3.0]], dtype=np.float32)
    d = derivative_array(ActivationKind.SWISHRELU, x)
    assert d.dtype == np.float32
    assert d[0, 1] == 1.0
    assert d[1, 1] == 1.0


def test_parse_accepts_case_and_rejects_unknown_names():
    assert ActivationKind.parse(" SwishReLU ") is ActivationKind.SWISHRELU
    with pytest.raises(ValidationError) as exc:
        ActivationKind.parse("gelu")
    assert exc.value.error_code == ErrorCode.UNKNOWN_ACTIVATION.value
    assert "swishrelu" in exc.value.message
    assert exc.value.exit_code == 2


def test_activation_curves_table():
    table = activation_curves([ActivationKind.RELU, ActivationKind.SWISHRELU], points=5, x_min=-2, x_max=2)
    assert list(table.columns) == ["x", "relu", "d_relu", "swishrelu", "d_swishrelu"]
    assert table["swishrelu"].iloc[-1] == 2.0
    assert table["d_relu"].iloc[0] == 0.0
