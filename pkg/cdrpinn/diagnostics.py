"""Failure-mode experiments for the one-dimensional benchmark

loss_distribution
    per-point r^2 after plain PINN training, one CSV per Xavier scheme
dense_layer_sampling
    plain PINN with extra points packed into the layer strip (0, 0.1)
region_rejection
    plain PINN trained only on (a, 1), a in {0.05, 0.1}, against the full domain
"""
import os

import numpy as np
import pandas as pd

from .domains import Interval
from .globals import GRAPHS
from .graphing import plot_loss_history, plot_prediction
from .metrics import nrmse, prediction_grid
from .problems import make_problem
from .sampling import TrainSet, sample_uniform
from .trainer import seed_streams, train, training_losses
from .util import ConfigurationError, get_logger

logger = get_logger(__name__)

EXPERIMENTS = ("loss_distribution", "dense_layer_sampling", "region_rejection")

LAYER_STRIP = 0.1
DENSE_MULTIPLES = (1, 5, 10)
REJECTION_CUTS = (0.05, 0.1)


def _plain(config, **changes):
    return config.merged(dict(curriculum=False, densify=False, **changes)).resolve()


def _points(lo, hi, n, rng):
    return Interval(lo, hi).sample_interior(rng, n)


def _train_variant(cfg, problem, train_set, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    model, log = train(cfg, train_set=train_set, out_dir=out_dir)
    grid = prediction_grid(model, problem, cfg.grid_resolution)
    plot_loss_history(log.to_frame(), os.path.join(out_dir, GRAPHS["loss"]))
    plot_prediction(grid, problem.dim, os.path.join(out_dir, GRAPHS["prediction"]))
    return model, log, grid


def loss_distribution(config, out_dir) -> pd.DataFrame:
    rows = []
    for scheme in ("normal", "uniform"):
        cfg = _plain(config, init=scheme)
        problem = make_problem(cfg.problem, cfg.epsilon)
        train_set = sample_uniform(problem, cfg.n_interior, cfg.n_boundary, seed_streams(cfg.seed)["sampling"])
        model, log, _ = _train_variant(cfg, problem, train_set, os.path.join(out_dir, "init_" + scheme))

        order = np.argsort(train_set.interior[:, 0])
        x = train_set.interior[order]
        frame = pd.DataFrame(x, columns=["x1"])
        frame["r2"] = problem.squared_residual(model, x)
        frame.to_csv(os.path.join(out_dir, "loss_distribution_{}.csv".format(scheme)), index=False, float_format="%.17g")

        top = frame["r2"] >= frame["r2"].quantile(0.9)
        rows.append(dict(
            init=scheme,
            argmax_x=float(frame["x1"][frame["r2"].idxmax()]),
            top_decile_in_layer=float(np.mean(frame["x1"][top] < 0.05)),
            final_L_phys=float(log.final()["L_phys_raw"]),
        ))
    return pd.DataFrame(rows)


def dense_layer_sampling(config, out_dir) -> pd.DataFrame:
    cfg = _plain(config)
    problem = make_problem(cfg.problem, cfg.epsilon)
    streams = seed_streams(cfg.seed)
    rng = np.random.default_rng(streams["densify"])
    boundary = sample_uniform(problem, 1, cfg.n_boundary, streams["sampling"]).boundary
    n = cfg.n_interior

    variants = {"uniform": _points(0.0, 1.0, n, rng)}
    outer = _points(LAYER_STRIP, 1.0, n, rng)
    for k in DENSE_MULTIPLES:
        inner = _points(0.0, LAYER_STRIP, k * n, rng)
        variants["layer_{}".format(k * n)] = np.concatenate([outer, inner])

    rows = []
    for name, interior in variants.items():
        model, log, grid = _train_variant(
            cfg, problem, TrainSet(interior, boundary), os.path.join(out_dir, "dense_" + name)
        )
        grid.to_csv(os.path.join(out_dir, "dense_sampling_{}.csv".format(name)), index=False, float_format="%.17g")
        rows.append(dict(
            variant=name,
            n_layer=int(np.sum(interior[:, 0] < LAYER_STRIP)),
            n_interior=interior.shape[0],
            nrmse=nrmse(model, problem, cfg.n_test, cfg.seed),
        ))
    return pd.DataFrame(rows)


def region_rejection(config, out_dir) -> pd.DataFrame:
    cfg = _plain(config)
    problem = make_problem(cfg.problem, cfg.epsilon)
    streams = seed_streams(cfg.seed)
    rng = np.random.default_rng(streams["densify"])
    boundary = sample_uniform(problem, 1, cfg.n_boundary, streams["sampling"]).boundary
    tail = TrainSet(_points(max(REJECTION_CUTS), 1.0, cfg.n_test, rng), boundary)

    rows = []
    for a in (0.0,) + REJECTION_CUTS:
        name = "full" if a == 0.0 else "a{:g}".format(a)
        train_set = TrainSet(_points(a, 1.0, cfg.n_interior, rng), boundary)
        model, log, _ = _train_variant(cfg, problem, train_set, os.path.join(out_dir, "region_" + name))
        rows.append(dict(
            variant=name,
            a=a,
            final_L_phys=training_losses(model, problem, train_set)["L_phys"],
            tail_L_phys=training_losses(model, problem, tail)["L_phys"],
            nrmse=nrmse(model, problem, cfg.n_test, cfg.seed),
        ))
    frame = pd.DataFrame(rows)
    frame.to_csv(os.path.join(out_dir, "region_rejection.csv"), index=False, float_format="%.17g")
    return frame


_RUNNERS = dict(
    loss_distribution=loss_distribution,
    dense_layer_sampling=dense_layer_sampling,
    region_rejection=region_rejection,
)


def run_diagnostics(config, experiment: str, out_dir: str) -> pd.DataFrame:
    """Run one experiment into `out_dir`; returns its summary table"""
    if experiment not in _RUNNERS:
        raise ConfigurationError(
            "unknown experiment '{}', expected one of {}".format(experiment, ", ".join(EXPERIMENTS))
        )
    cfg = config.resolve()
    if make_problem(cfg.problem, cfg.epsilon).dim != 1:
        raise ConfigurationError("{} needs a one-dimensional problem".format(experiment))
    os.makedirs(out_dir, exist_ok=True)
    logger.info("running %s into %s", experiment, out_dir, extra=dict(source=experiment))
    summary = _RUNNERS[experiment](config, out_dir)
    summary.to_csv(os.path.join(out_dir, "{}_summary.csv".format(experiment)), index=False)
    return summary
