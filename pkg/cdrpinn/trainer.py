"""Training loop

One run: Xavier model, training set (uniform, optionally densified after a
warmup), fixed threshold subset, then per iteration a threshold refresh every
K steps, a minibatch, the weighted residual loss plus the boundary loss, one
optimizer step and a log row every `log_period` steps.
"""
import json
import math
import os
import platform
import time
from dataclasses import asdict, dataclass, fields, replace
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from .autodiff import _tape as T
from .autodiff import param_gradient
from .curriculum import CurriculumState, compute_weights, update_threshold, weighted_mean
from .globals import BENCHMARK_DEFAULTS, GRID_RESOLUTION, N_TEST, VERSION
from .network import MlpModel, init_xavier
from .optim import Optimizer
from .problems import ProblemId, make_problem
from .sampling import MinibatchSampler, TrainSet, densify, pick_subset, sample_uniform
from .util import ConfigurationError, InvariantError, TrainingDivergenceError, get_logger

logger = get_logger(__name__)

LOG_FILE = "loss_history.csv"
CHECKPOINT_FILE = "checkpoint.bin"
META_FILE = "run_meta.json"
TRAIN_SET_FILE = "train_set.csv"

LOG_COLUMNS = ["t", "L_phys_w", "L_phys_raw", "L_bc", "beta", "wall_ms"]

_ALIASES = {"lambda": "lam"}
_BOOL_WORDS = {
    "on": True, "true": True, "yes": True, "1": True,
    "off": False, "false": False, "no": False, "0": False,
}


@dataclass(frozen=True)
class TrainConfig:
    """Every setting of a run; None fields are filled by `resolve()`

    `depth` counts hidden layers. `lam` is written `lambda` in config files.
    """

    problem: str = "P1D"
    epsilon: float = 1e-3
    depth: int = None
    width: int = None
    optimizer: str = "adam"
    lr: float = None
    batch_size: int = None
    iterations: int = None
    lam: float = 1.0
    G: float = None
    K: int = 50
    seed: int = 0
    curriculum: bool = True
    densify: bool = None
    n_interior: int = None
    n_boundary: int = None
    log_period: int = 100
    init: str = "normal"
    warmup_iterations: int = 1000
    subset_fraction: float = 0.2
    rot_outer_bc: str = "dirichlet"
    check_invariants: bool = False
    grad_method: str = "fd"
    n_test: int = None
    grid_resolution: int = None
    full_scale: bool = False

    @classmethod
    def keys(cls) -> List[str]:
        names = [f.name for f in fields(cls)]
        inverse = {v: k for k, v in _ALIASES.items()}
        return [inverse.get(n, n) for n in names]

    @classmethod
    def from_mapping(cls, mapping: Dict) -> "TrainConfig":
        """Build from config-file style keys, coercing string values"""
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, value in mapping.items():
            name = _ALIASES.get(key, key)
            if name not in types:
                raise ConfigurationError(
                    "unknown config key '{}'; accepted: {}".format(key, ", ".join(cls.keys()))
                )
            kwargs[name] = _coerce(key, value, types[name])
        return cls(**kwargs)

    def to_mapping(self) -> Dict:
        inverse = {v: k for k, v in _ALIASES.items()}
        return {inverse.get(k, k): v for k, v in asdict(self).items()}

    def merged(self, overrides: Dict) -> "TrainConfig":
        mapping = {k: v for k, v in self.to_mapping().items()}
        mapping.update(overrides)
        return TrainConfig.from_mapping(mapping)

    @property
    def method(self) -> str:
        return "curriculum" if self.curriculum else "pinn"

    def resolve(self) -> "TrainConfig":
        """Fill unset fields from the per-benchmark defaults and validate"""
        pid = ProblemId.parse(self.problem)
        table = BENCHMARK_DEFAULTS[pid.value]
        dim = make_problem(pid, 1.0).dim
        iterations = self.iterations
        if iterations is None:
            iterations = table["iterations"] if self.full_scale else table["reduced_iterations"]
        filled = dict(
            problem=pid.value,
            depth=_default(self.depth, table["depth"]),
            width=_default(self.width, table["width"]),
            lr=_default(self.lr, table["lr"]),
            batch_size=_default(self.batch_size, table["batch_size"]),
            iterations=iterations,
            G=_default(self.G, table["G"]),
            densify=_default(self.densify, table["densify"]),
            n_interior=_default(self.n_interior, table["n_interior"]),
            n_boundary=_default(self.n_boundary, table["n_boundary"]),
            n_test=_default(self.n_test, N_TEST[dim]),
            grid_resolution=_default(self.grid_resolution, GRID_RESOLUTION[dim]),
        )
        cfg = replace(self, **filled)
        cfg.validate()
        return cfg

    def validate(self):
        def need(cond, what):
            if not cond:
                raise ConfigurationError("invalid config: {}".format(what))

        need(0.0 < self.epsilon <= 1.0, "epsilon must lie in (0, 1]")
        for name in ("depth", "width", "batch_size", "iterations", "K", "n_interior",
                     "n_boundary", "log_period", "n_test", "grid_resolution"):
            need(getattr(self, name) >= 1, "{} must be >= 1".format(name))
        need(self.lr >= 0, "lr must be >= 0")
        need(self.G > 0, "G must be > 0")
        need(self.lam >= 0, "lambda must be >= 0")
        need(self.warmup_iterations >= 0, "warmup_iterations must be >= 0")
        need(0.0 < self.subset_fraction <= 1.0, "subset_fraction must lie in (0, 1]")
        need(self.optimizer in ("adam", "sgd"), "optimizer must be adam or sgd")
        need(self.init in ("normal", "uniform"), "init must be normal or uniform")
        need(self.rot_outer_bc in ("dirichlet", "none"), "rot_outer_bc must be dirichlet or none")
        need(self.grad_method in ("fd", "exact"), "grad_method must be fd or exact")

    def run_name(self) -> str:
        return "{}_eps{:g}_{}_G{:g}_s{}".format(
            self.problem, self.epsilon, self.method, self.G if self.G else 0, self.seed
        )


def _default(value, fallback):
    return fallback if value is None else value


def _coerce(key, value, kind):
    if value is None:
        return None
    if not isinstance(value, str):
        if kind in (bool, "bool") and not isinstance(value, bool):
            raise ConfigurationError("{}: expected on/off, got {!r}".format(key, value))
        return value
    text = value.strip()
    if text.lower() in ("none", ""):
        return None
    try:
        if kind in (bool, "bool"):
            return _BOOL_WORDS[text.lower()]
        if kind in (int, "int"):
            number = float(text)
            if not number.is_integer():
                raise ValueError
            return int(number)
        if kind in (float, "float"):
            return float(text)
    except (KeyError, ValueError):
        raise ConfigurationError(
            "{}: cannot read '{}' as {}".format(key, value, getattr(kind, "__name__", kind))
        ) from None
    return text


class TrainingLog:
    """Loss history; one row per logged iteration"""

    def __init__(self):
        self.rows: List[Dict] = []
        self.checkpoint: Optional[str] = None

    def append(self, t, l_phys_w, l_phys_raw, l_bc, beta, wall_ms):
        if self.rows and t <= self.rows[-1]["t"]:
            raise ValueError("log iterations must increase, got {} after {}".format(t, self.rows[-1]["t"]))
        self.rows.append(
            dict(t=t, L_phys_w=l_phys_w, L_phys_raw=l_phys_raw, L_bc=l_bc, beta=beta, wall_ms=wall_ms)
        )

    def __len__(self):
        return len(self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=LOG_COLUMNS)

    def to_csv(self, path: str):
        self.to_frame().to_csv(path, index=False, float_format="%.17g")

    @classmethod
    def from_csv(cls, path: str) -> "TrainingLog":
        log = cls()
        for row in pd.read_csv(path).to_dict("records"):
            log.append(int(row["t"]), row["L_phys_w"], row["L_phys_raw"], row["L_bc"],
                       row["beta"], row["wall_ms"])
        return log

    def final(self) -> Dict:
        return dict(self.rows[-1]) if self.rows else {}


def seed_streams(seed: int) -> Dict[str, np.random.SeedSequence]:
    """Independent child seeds of a run, one per random consumer"""
    names = ["sampling", "densify", "subset", "batches", "checks"]
    return dict(zip(names, np.random.SeedSequence(seed).spawn(len(names))))


@dataclass
class StepResult:
    grad: object
    l_phys_w: float
    l_phys_raw: float
    l_bc: float
    r2: np.ndarray
    weights: np.ndarray


def loss_and_gradient(model, problem, x_batch, x_boundary, beta, lam) -> StepResult:
    """Gradient of weighted L_phys + lam * L_bc; weights are held constant"""
    side = {}

    def closure(params):
        u, du, d2u = model.jets(x_batch, params=params)
        r = problem.residual_from_jets(x_batch, u, du, d2u)
        r2 = r * r
        r2v = np.asarray(T.value_of(r2))
        weights = compute_weights(beta, np.where(np.isfinite(r2v), r2v, 0.0))
        l_phys = weighted_mean(r2, weights)
        rb = problem.boundary_residual(model, x_boundary, check=False, params=params)
        l_bc = T.mean(rb * rb)
        side.update(r2=r2v, weights=weights, l_phys=l_phys, l_bc=l_bc)
        return l_phys + lam * l_bc, r2v

    grad = param_gradient(model, closure, points=x_batch)
    return StepResult(
        grad=grad,
        l_phys_w=float(T.value_of(side["l_phys"])),
        l_phys_raw=float(np.mean(side["r2"])),
        l_bc=float(T.value_of(side["l_bc"])),
        r2=side["r2"],
        weights=side["weights"],
    )


def _check_step(step: StepResult, beta: float, t: int):
    if not (np.isfinite(beta) and beta > 0):
        return
    contrib = step.weights * step.r2
    if np.any(contrib > beta * (1.0 + 1e-12)):
        raise InvariantError(
            "t={}: weighted contribution {:.6g} exceeds beta {:.6g}".format(t, contrib.max(), beta)
        )


def _run_steps(model, problem, train_set, state, optimizer, cfg, iterations, seeds, log=None, source=None):
    sampler = MinibatchSampler(train_set.n_interior, cfg.batch_size, seeds["batches"])
    checks = np.random.default_rng(seeds["checks"])
    start = time.perf_counter()
    for t in range(iterations):
        if state.due(t):
            update_threshold(state, model, problem, train_set)
        x_batch = train_set.interior[sampler.next()]
        step = loss_and_gradient(model, problem, x_batch, train_set.boundary, state.beta, cfg.lam)
        if cfg.check_invariants and checks.random() < 0.01:
            _check_step(step, state.beta, t)

        previous = model.parameters()
        optimizer.step(model, step.grad)
        if not model.is_finite():
            model.set_parameters(previous)
            raise TrainingDivergenceError("parameters became non-finite at t={}".format(t))

        if log is not None and (t % cfg.log_period == 0 or t == iterations - 1):
            wall_ms = 1e3 * (time.perf_counter() - start)
            log.append(t, step.l_phys_w, step.l_phys_raw, step.l_bc, state.beta, wall_ms)
            logger.info(
                "t=%d L_phys=%.4e raw=%.4e L_bc=%.4e beta=%.4g",
                t, step.l_phys_w, step.l_phys_raw, step.l_bc, state.beta,
                extra=dict(source=source),
            )


def build_train_set(cfg, problem, model, optimizer, seeds) -> Tuple[TrainSet, int]:
    """Uniform set, or half uniform then densified after a warmup

    Returns the set and the number of warmup steps taken on `model`.
    """
    if not cfg.densify:
        train_set = sample_uniform(problem, cfg.n_interior, cfg.n_boundary, seeds["sampling"])
        return train_set, 0

    half = sample_uniform(problem, math.ceil(cfg.n_interior / 2), cfg.n_boundary, seeds["sampling"])
    subset_idx = pick_subset(half, cfg.subset_fraction, seeds["subset"])
    half = half.with_subset(subset_idx)
    warm = CurriculumState(
        G=cfg.G, K=cfg.K, enabled=cfg.curriculum, grad_method=cfg.grad_method
    )
    _run_steps(model, problem, half, warm, optimizer, cfg, cfg.warmup_iterations, seeds)
    update_threshold(warm, model, problem, half)
    train_set = densify(half, problem, model, warm, cfg.n_interior, seeds["densify"])
    return train_set, cfg.warmup_iterations


def train(config: TrainConfig, train_set: TrainSet = None, out_dir: str = None) -> Tuple[MlpModel, TrainingLog]:
    """Run one training; artifacts go to `out_dir` when given

    Raises:
        TrainingDivergenceError: with `.model` (last finite parameters) and
            `.log` attached; the artifacts written so far stay in `out_dir`.
    """
    cfg = config.resolve()
    problem = make_problem(cfg.problem, cfg.epsilon, rot_outer_bc=cfg.rot_outer_bc)
    seeds = seed_streams(cfg.seed)
    source = cfg.run_name()

    model = init_xavier(problem.dim, cfg.depth, cfg.width, cfg.init, seed=cfg.seed)
    optimizer = Optimizer(cfg.optimizer, model, cfg.lr)
    log = TrainingLog()
    warmup = 0
    status = "ok"
    started = time.perf_counter()

    try:
        if train_set is None:
            train_set, warmup = build_train_set(cfg, problem, model, optimizer, seeds)
        if len(train_set.subset_idx) == 0:
            train_set = train_set.with_subset(
                pick_subset(train_set, cfg.subset_fraction, seeds["subset"])
            )
        state = CurriculumState(
            G=cfg.G, K=cfg.K, enabled=cfg.curriculum, subset_idx=train_set.subset_idx,
            grad_method=cfg.grad_method,
        )
        _run_steps(model, problem, train_set, state, optimizer, cfg, cfg.iterations, seeds, log, source)
    except TrainingDivergenceError as err:
        status = "diverged"
        err.model = model
        err.log = log
        logger.error("training diverged: %s", err, extra=dict(source=source))
        if out_dir:
            _write_artifacts(out_dir, cfg, model, log, train_set, warmup, status, started)
        raise

    if out_dir:
        _write_artifacts(out_dir, cfg, model, log, train_set, warmup, status, started)
    return model, log


def run_meta(cfg: TrainConfig, status="ok", warmup=0, wall_s=None) -> Dict:
    return dict(
        config=cfg.to_mapping(),
        seed=cfg.seed,
        method=cfg.method,
        status=status,
        warmup_steps=warmup,
        wall_s=wall_s,
        versions=dict(
            cdrpinn=VERSION,
            numpy=np.__version__,
            pandas=pd.__version__,
            python=platform.python_version(),
        ),
    )


def _write_artifacts(out_dir, cfg, model, log, train_set, warmup, status, started):
    os.makedirs(out_dir, exist_ok=True)
    log.to_csv(os.path.join(out_dir, LOG_FILE))
    checkpoint = os.path.join(out_dir, CHECKPOINT_FILE)
    model.save(checkpoint)
    log.checkpoint = checkpoint
    if train_set is not None:
        train_set.to_csv(os.path.join(out_dir, TRAIN_SET_FILE))
    meta = run_meta(cfg, status, warmup, time.perf_counter() - started)
    with open(os.path.join(out_dir, META_FILE), "w") as out:
        json.dump(meta, out, indent=2)


def load_run_config(path: str) -> TrainConfig:
    """Config of a finished run, from its run_meta.json"""
    with open(path) as src:
        meta = json.load(src)
    return TrainConfig.from_mapping(meta["config"])


def training_losses(model, problem, train_set: TrainSet, lo: float = None) -> Dict[str, float]:
    """Unweighted losses over the whole training set (optionally x1 > lo only)"""
    interior = train_set.interior
    if lo is not None:
        interior = interior[interior[:, 0] > lo]
    r2 = problem.squared_residual(model, interior)
    rb = problem.boundary_residual(model, train_set.boundary, check=False)
    return dict(L_phys=float(np.mean(r2)), L_bc=float(np.mean(rb * rb)))
