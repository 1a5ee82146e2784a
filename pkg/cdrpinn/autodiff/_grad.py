"""Derivatives of a network with respect to its inputs and parameters"""
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from ..util import ConfigurationError, TrainingDivergenceError, get_logger
from . import _tape as T
from ._jet import Jet2

logger = get_logger(__name__)


@dataclass
class ParamGradient:
    """Gradient of a scalar loss, shape-congruent with the model parameters"""

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    loss: float = float("nan")

    def as_list(self) -> List[np.ndarray]:
        """Interleaved [W0, b0, W1, b1, ...], the order of `MlpModel.parameters()`"""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def norm_inf(self) -> float:
        return max(float(np.max(np.abs(g))) for g in self.as_list())

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(g)) for g in self.as_list())


def _as_points(x, dim: int) -> np.ndarray:
    points = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if points.shape[-1] != dim:
        raise ConfigurationError(
            "point has {} coordinates, model expects {}".format(points.shape[-1], dim)
        )
    return points


def forward_jet(model, x, coord: int) -> Jet2:
    """(u(x), du/dx_k, d2u/dx_k^2) at a single point, k = `coord`"""
    point = _as_points(x, model.input_dim)
    if point.shape[0] != 1:
        raise ConfigurationError("forward_jet evaluates one point at a time")
    if not 0 <= coord < model.input_dim:
        raise ConfigurationError(
            "coordinate {} out of range for input dimension {}".format(
                coord, model.input_dim
            )
        )
    u, du, d2u = model.jets(point, coords=[coord])
    return Jet2(float(u[0]), float(du[0, 0]), float(d2u[0, 0]))


def param_gradient(
    model, loss_closure: Callable, points: Optional[np.ndarray] = None
) -> ParamGradient:
    """Gradient of `loss_closure` with respect to the model parameters

    `loss_closure(params)` receives the parameters as tape nodes and returns
    either the scalar loss node or `(loss, per_sample)`; `per_sample` (one
    value per row of `points`) locates the offending sample when the loss is
    not finite.
    """
    params = [T.Node(p) for p in model.parameters()]
    out = loss_closure(params)
    per_sample = None
    if isinstance(out, tuple):
        out, per_sample = out
    loss = float(np.asarray(T.value_of(out)).reshape(()))

    if not np.isfinite(loss):
        sample = None
        if per_sample is not None and points is not None:
            bad = ~np.isfinite(np.asarray(T.value_of(per_sample)))
            if np.any(bad):
                sample = np.asarray(points)[int(np.argmax(bad))]
        raise TrainingDivergenceError(
            "loss is not finite ({})".format(loss), sample=sample
        )

    if isinstance(out, T.Node):
        T.backward(out)
    grads = [
        p.grad if p.grad is not None else np.zeros_like(p.value) for p in params
    ]
    return ParamGradient(weights=grads[0::2], biases=grads[1::2], loss=loss)


@dataclass
class SpatialGradient:
    """|grad_x r^2| per point; `clamped` marks one-sided stencils near the boundary"""

    norm: np.ndarray
    clamped: np.ndarray


def residual_spatial_gradient(
    model, problem, x, method: str = "fd", rel_step: float = 1e-4
) -> SpatialGradient:
    """Euclidean norm of the x-gradient of the squared physical residual

    `method="fd"` uses central differences of r^2 with step
    `rel_step * diameter`, switching to one-sided differences where the
    stencil leaves the domain. `method="exact"` differentiates the residual
    itself with respect to the sample coordinates on the tape.
    """
    single = np.ndim(x) == 1
    points = _as_points(x, problem.dim)

    if method == "exact":
        norm = _exact_gradient_norm(model, problem, points)
        clamped = np.zeros(points.shape[0], dtype=bool)
    elif method == "fd":
        norm, clamped = _fd_gradient_norm(model, problem, points, rel_step)
    else:
        raise ConfigurationError("unknown gradient method '{}'".format(method))

    if single:
        return SpatialGradient(norm=float(norm[0]), clamped=bool(clamped[0]))
    return SpatialGradient(norm=norm, clamped=clamped)


def _squared_residual(model, problem, points):
    r = problem.residual(model, points, check=False)
    return r * r


def _fd_gradient_norm(model, problem, points, rel_step):
    h = rel_step * problem.domain.diameter
    n, d = points.shape
    stencil = [points]
    for k in range(d):
        step = np.zeros(d)
        step[k] = h
        stencil.extend([points + step, points - step])
    with np.errstate(over="ignore", invalid="ignore"):
        values = _squared_residual(model, problem, np.concatenate(stencil))
    values = values.reshape(2 * d + 1, n)
    centre = values[0]

    grad = np.empty((n, d))
    clamped = np.zeros(n, dtype=bool)
    for k in range(d):
        plus, minus = values[1 + 2 * k], values[2 + 2 * k]
        inside_plus = problem.domain.contains(stencil[1 + 2 * k])
        inside_minus = problem.domain.contains(stencil[2 + 2 * k])
        grad[:, k] = np.where(
            inside_plus & inside_minus,
            (plus - minus) / (2.0 * h),
            np.where(inside_plus, (plus - centre) / h, (centre - minus) / h),
        )
        clamped |= ~(inside_plus & inside_minus)

    if np.any(clamped):
        logger.debug(
            "one-sided residual gradient at %d of %d points", clamped.sum(), n
        )
    return np.linalg.norm(grad, axis=1), clamped


def _exact_gradient_norm(model, problem, points):
    leaf = T.Node(points)
    r = problem.residual(model, leaf, check=False)
    T.backward(T.tsum(r * r))
    return np.linalg.norm(leaf.grad, axis=1)
