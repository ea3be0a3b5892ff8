"""Adam update rule against a hand-rolled scalar oracle."""

import numpy as np
import pytest

from ecgcrnn.nn import AdamState, adam_step
from ecgcrnn.nn.ops import NumericError


def scalar_adam_oracle(w0, grads, lr, b1=0.9, b2=0.999, eps=1e-8):
    """Straight transcription of the update equations for one scalar."""
    w, m, v = w0, 0.0, 0.0
    out = []
    for t, g in enumerate(grads, start=1):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        m_hat = m / (1 - b1 ** t)
        v_hat = v / (1 - b2 ** t)
        w = w - lr * m_hat / (np.sqrt(v_hat) + eps)
        out.append(w)
    return out


def test_first_step_is_signed_learning_rate():
    for g in (0.3, -12.0, 1e-4):
        params = {"w": np.array([1.0])}
        state = AdamState.init(params, lr=5e-4)
        adam_step(params, {"w": np.array([g])}, state)
        assert params["w"][0] == pytest.approx(1.0 - 5e-4 * np.sign(g), abs=1e-7)


def test_zero_gradient_leaves_everything_unchanged():
    params = {"w": np.array([2.0, -1.0])}
    state = AdamState.init(params, lr=1e-3)
    adam_step(params, {"w": np.zeros(2)}, state)
    np.testing.assert_array_equal(params["w"], [2.0, -1.0])
    np.testing.assert_array_equal(state.m["w"], 0.0)
    np.testing.assert_array_equal(state.v["w"], 0.0)
    assert state.t == 1


def test_three_steps_on_quadratic_match_oracle():
    # f(w) = w^2, gradient 2w, starting from w = 1
    lr = 0.1
    params = {"w": np.array([1.0])}
    state = AdamState.init(params, lr=lr)
    trajectory = []
    oracle_grads = []
    w_oracle = 1.0
    for _ in range(3):
        g = 2 * params["w"][0]
        adam_step(params, {"w": np.array([g])}, state)
        trajectory.append(params["w"][0])
    # replay with the oracle, regenerating gradients from its own trajectory
    w, m, v = 1.0, 0.0, 0.0
    expected = []
    for t in range(1, 4):
        g = 2 * w
        m = 0.9 * m + 0.1 * g
        v = 0.999 * v + 0.001 * g * g
        w = w - lr * (m / (1 - 0.9 ** t)) / (np.sqrt(v / (1 - 0.999 ** t)) + 1e-8)
        expected.append(w)
    np.testing.assert_allclose(trajectory, expected, atol=1e-12)


def test_vector_steps_match_oracle_per_element(rng):
    params = {"w": rng.standard_normal(5)}
    w0 = params["w"].copy()
    grads = [rng.standard_normal(5) for _ in range(4)]
    state = AdamState.init(params, lr=0.01)
    for g in grads:
        adam_step(params, {"w": g}, state)
    for i in range(5):
        expected = scalar_adam_oracle(w0[i], [g[i] for g in grads], lr=0.01)[-1]
        assert params["w"][i] == pytest.approx(expected, abs=1e-12)


def test_nonfinite_gradient_rejected():
    params = {"w": np.array([1.0])}
    state = AdamState.init(params, lr=1e-3)
    with pytest.raises(NumericError):
        adam_step(params, {"w": np.array([np.inf])}, state)
