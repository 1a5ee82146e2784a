import numpy as np
import pytest

from cdrpinn.autodiff import ParamGradient
from cdrpinn.optim import AdamState, Optimizer, adam_step, sgd_step
from cdrpinn.util import ConfigurationError, TrainingDivergenceError


def _gradient_like(model, rng, scale=1.0):
    grads = [scale * rng.normal(size=p.shape) for p in model.parameters()]
    return ParamGradient(weights=grads[0::2], biases=grads[1::2])


def test_sgd_step(small_model, rng):
    before = [p.copy() for p in small_model.parameters()]
    grad = _gradient_like(small_model, rng)
    sgd_step(small_model, grad, 0.1)
    for p, q, g in zip(small_model.parameters(), before, grad.as_list()):
        np.testing.assert_array_equal(p, q - 0.1 * g)


def test_adam_matches_reference_recursion(small_model, rng):
    lr, b1, b2, eps = 1e-2, 0.9, 0.999, 1e-8
    state = AdamState.for_model(small_model, lr)
    theta = [p.copy() for p in small_model.parameters()]
    m = [np.zeros_like(p) for p in theta]
    v = [np.zeros_like(p) for p in theta]
    for t in range(1, 6):
        grad = _gradient_like(small_model, rng)
        small_model, state = adam_step(state, small_model, grad)
        for i, g in enumerate(grad.as_list()):
            m[i] = b1 * m[i] + (1 - b1) * g
            v[i] = b2 * v[i] + (1 - b2) * g * g
            theta[i] = theta[i] - lr * (m[i] / (1 - b1 ** t)) / (np.sqrt(v[i] / (1 - b2 ** t)) + eps)
    assert state.t == 5
    for p, q in zip(small_model.parameters(), theta):
        np.testing.assert_allclose(p, q, rtol=1e-14, atol=1e-16)


def test_adam_first_step_moves_by_learning_rate(small_model, rng):
    before = [p.copy() for p in small_model.parameters()]
    Optimizer("adam", small_model, 1e-3).step(small_model, _gradient_like(small_model, rng, scale=10.0))
    for p, q in zip(small_model.parameters(), before):
        np.testing.assert_allclose(np.abs(p - q), 1e-3, rtol=1e-4)


def test_zero_learning_rate_keeps_parameters(small_model, rng):
    before = [p.copy() for p in small_model.parameters()]
    for name in ("sgd", "adam"):
        Optimizer(name, small_model, 0.0).step(small_model, _gradient_like(small_model, rng))
    for p, q in zip(small_model.parameters(), before):
        np.testing.assert_array_equal(p, q)


def test_non_finite_gradient_is_divergence(small_model, rng):
    grad = _gradient_like(small_model, rng)
    grad.weights[0][0, 0] = np.inf
    with pytest.raises(TrainingDivergenceError):
        sgd_step(small_model, grad, 0.1)
    with pytest.raises(TrainingDivergenceError):
        Optimizer("adam", small_model, 0.1).step(small_model, grad)


def test_gradient_must_match_model_shapes(small_model, rng):
    grad = _gradient_like(small_model, rng)
    grad.biases[0] = np.zeros(3)
    with pytest.raises(ConfigurationError):
        sgd_step(small_model, grad, 0.1)


def test_large_gradient_is_logged(small_model, rng, cdrpinn_log):
    sgd_step(small_model, _gradient_like(small_model, rng, scale=1e13), 0.0)
    assert any("exceeds" in r.getMessage() for r in cdrpinn_log.records)


@pytest.mark.parametrize("name, lr", [("lbfgs", 0.1), ("adam", -1.0)])
def test_optimizer_rejects_bad_settings(small_model, name, lr):
    with pytest.raises(ConfigurationError):
        Optimizer(name, small_model, lr)


def _towards(model, target):
    # gradient of 0.5 * |theta - target|^2
    grads = [p - q for p, q in zip(model.parameters(), target)]
    return ParamGradient(weights=grads[0::2], biases=grads[1::2])


@pytest.mark.parametrize("name, lr, steps, tol", [("sgd", 0.1, 300, 1e-10), ("adam", 1e-2, 3000, 5e-2)])
def test_optimizers_converge_on_a_quadratic(small_model, rng, name, lr, steps, tol):
    target = [rng.normal(size=p.shape) for p in small_model.parameters()]
    opt = Optimizer(name, small_model, lr)
    start = max(float(np.max(np.abs(p - q))) for p, q in zip(small_model.parameters(), target))
    for _ in range(steps):
        opt.step(small_model, _towards(small_model, target))
    end = max(float(np.max(np.abs(p - q))) for p, q in zip(small_model.parameters(), target))
    assert end < tol < start


def test_zero_gradient_is_a_fixed_point_and_moments_decay(small_model, rng):
    zero = ParamGradient(
        weights=[np.zeros_like(w) for w in small_model.weights],
        biases=[np.zeros_like(b) for b in small_model.biases],
    )
    before = [p.copy() for p in small_model.parameters()]
    state = AdamState.for_model(small_model, 1e-2)
    for _ in range(3):
        adam_step(state, small_model, zero)
    for p, q in zip(small_model.parameters(), before):
        np.testing.assert_array_equal(p, q)

    adam_step(state, small_model, _gradient_like(small_model, rng))
    m, v = [x.copy() for x in state.m], [x.copy() for x in state.v]
    for _ in range(5):
        adam_step(state, small_model, zero)
    for i in range(len(m)):
        np.testing.assert_allclose(state.m[i], 0.9 ** 5 * m[i], rtol=1e-14)
        np.testing.assert_allclose(state.v[i], 0.999 ** 5 * v[i], rtol=1e-14)


def test_adam_first_step_by_hand():
    from cdrpinn.network import MlpModel

    model = MlpModel([[[1.0]], [[-0.5]]], [[0.25], [3.0]])
    grad = ParamGradient(weights=[np.array([[2.0]]), np.array([[-4.0]])], biases=[np.array([0.0]), np.array([1e-3])])
    state = AdamState.for_model(model, 0.1)
    adam_step(state, model, grad)
    # m_hat = g and v_hat = g^2 after one step
    np.testing.assert_allclose(state.m[0], [[0.2]])
    np.testing.assert_allclose(state.v[0], [[0.004]])
    assert model.weights[0][0, 0] == pytest.approx(1.0 - 0.1 * 2.0 / (2.0 + 1e-8), rel=1e-15)
    assert model.weights[1][0, 0] == pytest.approx(-0.5 + 0.1 * 4.0 / (4.0 + 1e-8), rel=1e-15)
    assert model.biases[0][0] == 0.25
    assert model.biases[1][0] == pytest.approx(3.0 - 0.1 * 1e-3 / (1e-3 + 1e-8), rel=1e-12)
