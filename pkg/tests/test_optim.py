import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swishnet.core.error_codes import ErrorCode
from swishnet.core.exceptions import ConfigurationError, DimensionError
from swishnet.optim import AdamState, Decision, EarlyStopping, SgdMomentumState, adam_step, early_stopping_update
from swishnet.optim import sgd_momentum_step


def scalar_params(value: float = 0.0):
    return {(0, "weight"): np.array([value])}


class TestSgdMomentum:
    def test_two_steps_accumulate_velocity(self):
        params = scalar_params()
        state = SgdMomentumState(learning_rate=0.01, momentum=0.9)
        grads = {(0, "weight"): np.array([1.0])}
        sgd_momentum_step(state, params, grads)
        np.testing.assert_allclose(params[(0, "weight")], [-0.01])
        sgd_momentum_step(state, params, grads)
        np.testing.assert_allclose(params[(0, "weight")], [-0.029])

    def test_updates_in_place(self):
        params = scalar_params(1.0)
        array = params[(0, "weight")]
        sgd_momentum_step(SgdMomentumState(), params, {(0, "weight"): np.array([2.0])})
        assert params[(0, "weight")] is array

    def test_zero_gradient_leaves_parameters(self):
        params = {(0, "weight"): np.arange(6.0).reshape(2, 3), (0, "bias"): np.ones(3)}
        before = {k: v.copy() for k, v in params.items()}
        zeros = {k: np.zeros_like(v) for k, v in params.items()}
        state = SgdMomentumState()
        for _ in range(3):
            sgd_momentum_step(state, params, zeros)
        for key in params:
            np.testing.assert_array_equal(params[key], before[key])

    def test_gradient_shape_mismatch(self):
        with pytest.raises(DimensionError) as exc:
            sgd_momentum_step(SgdMomentumState(), scalar_params(), {(0, "weight"): np.zeros(2)})
        assert exc.value.error_code == ErrorCode.DIMENSION_MISMATCH.value

    def test_missing_gradient(self):
        with pytest.raises(DimensionError):
            sgd_momentum_step(SgdMomentumState(), scalar_params(), {})

    @pytest.mark.parametrize("kwargs", [{"learning_rate": 0.0}, {"learning_rate": -1.0}, {"momentum": 1.0}])
    def test_invalid_hyperparameters(self, kwargs):
        with pytest.raises(ConfigurationError) as exc:
            SgdMomentumState(**kwargs)
        assert exc.value.error_code == ErrorCode.INVALID_HYPERPARAMETER.value


class TestAdam:
    @given(st.floats(min_value=1e-3, max_value=1e3), st.booleans())
    def test_first_step_moves_by_learning_rate(self, magnitude, negative):
        g = -magnitude if negative else magnitude
        params = scalar_params()
        state = AdamState(learning_rate=0.001)
        adam_step(state, params, {(0, "weight"): np.array([g])})
        assert state.step == 1
        np.testing.assert_allclose(params[(0, "weight")], [-math.copysign(0.001, g)], rtol=1e-4)

    def test_zero_gradient_leaves_parameters(self):
        params = scalar_params(0.25)
        state = AdamState()
        for _ in range(4):
            adam_step(state, params, {(0, "weight"): np.zeros(1)})
        np.testing.assert_array_equal(params[(0, "weight")], [0.25])
        assert state.step == 4

    def test_state_shape_mismatch(self):
        state = AdamState()
        adam_step(state, scalar_params(), {(0, "weight"): np.ones(1)})
        with pytest.raises(DimensionError):
            adam_step(state, {(0, "weight"): np.zeros(3)}, {(0, "weight"): np.ones(3)})

    def test_minimises_a_quadratic(self):
        params = scalar_params(3.0)
        state = AdamState(learning_rate=0.1)
        for _ in range(300):
            adam_step(state, params, {(0, "weight"): 2.0 * params[(0, "weight")]})
        assert abs(params[(0, "weight")][0]) < 0.05

    @pytest.mark.parametrize(
        "kwargs", [{"learning_rate": 0.0}, {"beta1": 1.0}, {"beta2": -0.1}, {"epsilon": 0.0}]
    )
    def test_invalid_hyperparameters(self, kwargs):
        with pytest.raises(ConfigurationError):
            AdamState(**kwargs)


class TestEarlyStopping:
    def run(self, losses, patience=5):
        es = EarlyStopping(patience=patience)
        for epoch, loss in enumerate(losses, start=1):
            if early_stopping_update(es, loss) is Decision.STOP:
                return es, epoch
        return es, None

    def test_stops_after_patience_without_improvement(self):
        es, stopped_at = self.run([0.5, 0.4, 0.41, 0.42, 0.43, 0.44, 0.45])
        assert stopped_at == 7
        assert es.best_epoch == 2
        assert es.best == 0.4
        assert not es.diverged

    def test_equal_loss_is_not_improvement(self):
        _, stopped_at = self.run([1.0, 1.0, 1.0], patience=2)
        assert stopped_at == 3

    @given(st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=40, unique=True))
    def test_strictly_decreasing_never_stops(self, values):
        _, stopped_at = self.run(sorted(values, reverse=True), patience=1)
        assert stopped_at is None

    @pytest.mark.parametrize("bad", [float("nan"), float("inf")])
    def test_non_finite_loss_diverges(self, bad):
        es, stopped_at = self.run([1.0, bad])
        assert stopped_at == 2
        assert es.diverged
        assert es.best_epoch == 1

    def test_patience_must_be_positive(self):
        with pytest.raises(ConfigurationError):
            EarlyStopping(patience=0)
