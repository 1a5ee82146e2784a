"""Collocation sets: uniform sampling, densification near high-loss points,
the fixed threshold subset and minibatch order
"""
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from .util import ConfigurationError, get_logger

logger = get_logger(__name__)

DENSIFY_MAX_ROUNDS = 20
"""Perturbation rounds before the remainder is filled uniformly"""

SIGMA_FRACTION = 0.01
"""Perturbation scale relative to the domain diameter"""


@dataclass(frozen=True)
class TrainSet:
    interior: np.ndarray
    boundary: np.ndarray
    subset_idx: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def n_interior(self) -> int:
        return self.interior.shape[0]

    @property
    def n_boundary(self) -> int:
        return self.boundary.shape[0]

    @property
    def subset(self) -> np.ndarray:
        return self.interior[self.subset_idx]

    def with_subset(self, idx) -> "TrainSet":
        idx = np.asarray(idx, dtype=int)
        if np.unique(idx).size != idx.size:
            raise ConfigurationError("subset indices must be unique")
        return replace(self, subset_idx=idx)

    def to_frame(self) -> pd.DataFrame:
        """One point per row: x1.., kind (interior|boundary), in_subset"""
        dim = self.interior.shape[1]
        cols = ["x{}".format(k + 1) for k in range(dim)]
        interior = pd.DataFrame(self.interior, columns=cols)
        interior["kind"] = "interior"
        interior["in_subset"] = False
        interior.loc[self.subset_idx, "in_subset"] = True
        boundary = pd.DataFrame(self.boundary.reshape(-1, dim), columns=cols)
        boundary["kind"] = "boundary"
        boundary["in_subset"] = False
        return pd.concat([interior, boundary], ignore_index=True)

    def to_csv(self, path: str):
        self.to_frame().to_csv(path, index=False, float_format="%.17g")


def sample_boundary(problem, rng: np.random.Generator, n: int) -> np.ndarray:
    """Dirichlet data points: the boundary and, for the rotating flow, the slit"""
    if problem.slit is None:
        return problem.domain.sample_boundary(rng, n)
    if not problem.outer_bc:
        return problem.slit.sample(rng, n)
    on_slit = n // 2
    return np.concatenate(
        [problem.slit.sample(rng, on_slit), problem.domain.sample_boundary(rng, n - on_slit)]
    )


def sample_uniform(problem, n_interior: int, n_boundary: int, seed) -> TrainSet:
    """i.i.d. uniform interior points and boundary points, deterministic in `seed`"""
    if n_interior < 1 or n_boundary < 1:
        raise ConfigurationError(
            "need at least one interior and one boundary point, got {} and {}".format(
                n_interior, n_boundary
            )
        )
    rng = np.random.default_rng(seed)
    interior = problem.domain.sample_interior(rng, n_interior)
    boundary = sample_boundary(problem, rng, n_boundary)
    return TrainSet(interior=interior, boundary=boundary)


def densify(train_set: TrainSet, problem, model, curriculum, target_n: int, seed) -> TrainSet:
    """Grow the interior set to `target_n` around points whose r^2 exceeds beta

    Every round, each interior point with r^2 > beta spawns one copy displaced
    by N(0, sigma^2 I), sigma = diameter / 100, clamped into the domain.
    Without such points (or after `DENSIFY_MAX_ROUNDS`) the rest is uniform.
    """
    rng = np.random.default_rng(seed)
    domain = problem.domain
    sigma = SIGMA_FRACTION * domain.diameter
    beta = curriculum.beta
    points = train_set.interior
    perturbed = 0

    for _ in range(DENSIFY_MAX_ROUNDS):
        need = target_n - points.shape[0]
        if need <= 0:
            break
        r2 = problem.squared_residual(model, points)
        hot = np.flatnonzero(r2 > beta)
        if not hot.size:
            break
        if hot.size > need:
            hot = rng.choice(hot, size=need, replace=False)
        moved = points[hot] + rng.normal(0.0, sigma, size=(hot.size, domain.dim))
        moved = domain.clamp(moved)
        moved = moved[domain.contains(moved)]
        perturbed += moved.shape[0]
        points = np.concatenate([points, moved])

    uniform = max(target_n - points.shape[0], 0)
    if uniform:
        points = np.concatenate([points, domain.sample_interior(rng, uniform)])

    logger.info(
        "densified to %d interior points: %d perturbed, %d uniform (beta=%.4g)",
        points.shape[0],
        perturbed,
        uniform,
        beta,
    )
    return TrainSet(interior=points, boundary=train_set.boundary)


def pick_subset(train_set: TrainSet, fraction: float = 0.2, seed=None) -> np.ndarray:
    """floor(N * fraction) distinct interior indices, sorted"""
    if not 0.0 < fraction <= 1.0:
        raise ConfigurationError("subset fraction must lie in (0, 1], got {}".format(fraction))
    n = train_set.n_interior
    size = int(np.floor(n * fraction))
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=size, replace=False))


class MinibatchSampler:
    """Interior minibatch indices, a fresh permutation every epoch"""

    def __init__(self, n: int, batch_size: int, seed):
        if batch_size < 1:
            raise ConfigurationError("batch size must be >= 1, got {}".format(batch_size))
        self.n = n
        self.batch_size = min(batch_size, n)
        self._rng = np.random.default_rng(seed)
        self._order = self._rng.permutation(n)
        self._pos = 0
        self.epoch = 0

    def next(self) -> np.ndarray:
        if self._pos + self.batch_size > self.n:
            self._order = self._rng.permutation(self.n)
            self._pos = 0
            self.epoch += 1
        idx = self._order[self._pos : self._pos + self.batch_size]
        self._pos += self.batch_size
        return idx

    def __iter__(self):
        return self

    def __next__(self):
        return self.next()
