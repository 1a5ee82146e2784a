"""Loss-threshold curriculum

Samples whose squared residual exceeds the threshold beta get weight
beta / r^2, everything else weight 1. beta is refreshed every K iterations
from a fixed subset of the training set: the largest r^2 among subset points
whose residual is flat enough in x (|grad_x r^2| < G), i.e. away from layers.
"""
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .autodiff import residual_spatial_gradient
from .autodiff import _tape as T
from .util import ConfigurationError, get_logger

logger = get_logger(__name__)

GRADIENT_CHUNK = 2048


@dataclass
class CurriculumState:
    """Threshold bookkeeping for one training run

    Attributes:
        beta: current threshold, +inf until the first update
        G: residual-gradient cutoff for the memory bank
        K: update period in iterations
        memory_bank: r^2 values accepted by the latest update
        subset_idx: interior indices of the fixed threshold subset
        enabled: False keeps beta at +inf, i.e. a plain PINN
    """

    G: float
    K: int = 50
    beta: float = float("inf")
    memory_bank: List[float] = field(default_factory=list)
    subset_idx: np.ndarray = None
    enabled: bool = True
    grad_method: str = "fd"
    updates: int = 0
    fallbacks: int = 0

    def __post_init__(self):
        if not self.G > 0:
            raise ConfigurationError("G must be > 0, got {}".format(self.G))
        if self.K < 1:
            raise ConfigurationError("K must be >= 1, got {}".format(self.K))

    def due(self, t: int) -> bool:
        return self.enabled and t % self.K == 0


def threshold_from(gradients, losses, G: float) -> Tuple[float, np.ndarray, bool]:
    """(beta, memory bank, fallback used) for one subset evaluation"""
    gradients = np.asarray(gradients, dtype=np.float64)
    losses = np.asarray(losses, dtype=np.float64)
    if losses.size == 0:
        raise ConfigurationError("threshold subset is empty")
    bank = losses[gradients < G]
    if bank.size:
        return float(np.max(bank)), bank, False
    return float(np.max(losses)), bank, True


def update_threshold(state: CurriculumState, model, problem, train_set) -> CurriculumState:
    """Refill the memory bank over the subset and reset beta to its maximum"""
    idx = state.subset_idx if state.subset_idx is not None else train_set.subset_idx
    if idx is None or len(idx) == 0:
        raise ConfigurationError("threshold subset is empty")
    points = train_set.interior[idx]

    losses = problem.squared_residual(model, points)
    gradients = np.concatenate(
        [
            np.atleast_1d(
                residual_spatial_gradient(
                    model, problem, points[s : s + GRADIENT_CHUNK], method=state.grad_method
                ).norm
            )
            for s in range(0, points.shape[0], GRADIENT_CHUNK)
        ]
    )

    beta, bank, fallback = threshold_from(gradients, losses, state.G)
    state.memory_bank = bank.tolist()
    state.beta = beta
    state.updates += 1
    if fallback:
        state.fallbacks += 1
        logger.info(
            "memory bank empty (no |grad r^2| < %g in %d subset points), beta = max r^2 = %.4g",
            state.G,
            points.shape[0],
            beta,
        )
    else:
        logger.debug("beta = %.4g from %d of %d subset points", beta, bank.size, points.shape[0])
    return state


def compute_weights(state_or_beta, r2) -> np.ndarray:
    """w = 1 where r^2 <= beta, beta / r^2 elsewhere

    beta = +inf gives all ones; beta = 0 gives 1 where r^2 = 0 and 0 elsewhere.
    """
    beta = getattr(state_or_beta, "beta", state_or_beta)
    r2 = np.asarray(r2, dtype=np.float64)
    if np.any(r2 < 0):
        raise ValueError("squared residuals must be nonnegative")
    if np.isinf(beta):
        return np.ones_like(r2)
    if beta == 0.0:
        return np.where(r2 == 0.0, 1.0, 0.0)
    w = np.ones_like(r2)
    np.divide(beta, r2, out=w, where=r2 > beta)
    return w


@dataclass
class WeightedBatch:
    points: np.ndarray
    residuals: np.ndarray
    weights: np.ndarray

    @property
    def squared(self) -> np.ndarray:
        return np.asarray(self.residuals) ** 2


def weighted_mean(r2, weights):
    """sum(w r^2) / sum(w) on arrays or tape nodes; plain mean when all w = 1"""
    w = np.asarray(weights, dtype=np.float64)
    if np.all(w == 1.0):
        return T.mean(r2)
    total = float(np.sum(w))
    if not total > 0.0:
        logger.warning("all %d sample weights are zero, using the plain mean", w.size)
        return T.mean(r2)
    return T.tsum(T.mul(r2, w)) / total


def weighted_physical_loss(batch: WeightedBatch) -> float:
    return float(weighted_mean(batch.squared, batch.weights))
