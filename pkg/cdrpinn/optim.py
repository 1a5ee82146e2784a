"""First-order parameter updates: plain SGD and bias-corrected Adam"""
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .autodiff import ParamGradient
from .util import ConfigurationError, TrainingDivergenceError, get_logger

logger = get_logger(__name__)

LARGE_GRADIENT = 1e12


def _check_gradient(model, grad: ParamGradient) -> List[np.ndarray]:
    grads = grad.as_list()
    params = model.parameters()
    if len(grads) != len(params) or any(
        g.shape != p.shape for g, p in zip(grads, params)
    ):
        raise ConfigurationError("gradient is not shape-congruent with the model")
    if not grad.is_finite():
        raise TrainingDivergenceError("gradient has non-finite entries")
    norm = grad.norm_inf()
    if norm > LARGE_GRADIENT:
        logger.warning("gradient max-norm %.3e exceeds %.0e", norm, LARGE_GRADIENT)
    return grads


def sgd_step(model, grad: ParamGradient, lr: float):
    """theta <- theta - lr * grad, in place; returns the model"""
    grads = _check_gradient(model, grad)
    model.set_parameters([p - lr * g for p, g in zip(model.parameters(), grads)])
    return model


@dataclass
class AdamState:
    """Moment accumulators of one Adam optimizer"""

    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_model(cls, model, lr: float, **kwargs) -> "AdamState":
        zeros = [np.zeros_like(p) for p in model.parameters()]
        return cls(lr=lr, m=zeros, v=[z.copy() for z in zeros], **kwargs)


def adam_step(state: AdamState, model, grad: ParamGradient):
    """One Adam step, in place on both `state` and `model`; returns them"""
    grads = _check_gradient(model, grad)
    if not state.m:
        state.m = [np.zeros_like(g) for g in grads]
        state.v = [np.zeros_like(g) for g in grads]

    state.t += 1
    b1, b2 = state.beta1, state.beta2
    correct1 = 1.0 - b1 ** state.t
    correct2 = 1.0 - b2 ** state.t

    params = []
    for i, (p, g) in enumerate(zip(model.parameters(), grads)):
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g
        m_hat = state.m[i] / correct1
        v_hat = state.v[i] / correct2
        params.append(p - state.lr * m_hat / (np.sqrt(v_hat) + state.eps))
    model.set_parameters(params)
    return model, state


class Optimizer:
    """Uniform `step(model, grad)` front for the two update rules"""

    def __init__(self, name: str, model, lr: float):
        if name not in ("adam", "sgd"):
            raise ConfigurationError("unknown optimizer '{}'".format(name))
        if lr < 0:
            raise ConfigurationError("learning rate must be >= 0, got {}".format(lr))
        self.name = name
        self.lr = lr
        self.state = AdamState.for_model(model, lr) if name == "adam" else None

    def step(self, model, grad: ParamGradient):
        if self.state is not None:
            adam_step(self.state, model, grad)
        else:
            sgd_step(model, grad, self.lr)
        return model
