"""Evaluation of trained models

NRMSE against exact solutions on seeded uniform test points, prediction
grids, and overshoot/undershoot against the admissible value range for the
problems without an exact solution.
"""
import json
import os
from dataclasses import dataclass, field, fields
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from .util import UndefinedMetricError, get_logger

logger = get_logger(__name__)

METRICS_FILE = "metrics.json"
GRID_FILE = "prediction_grid.csv"

TEST_STREAM = 7
"""Child index of the run seed reserved for test points"""


@dataclass
class EvalReport:
    overshoot: float
    undershoot: float
    n_test: int
    seed: int
    nrmse: Optional[float] = None
    max_abs_error: Optional[float] = None
    grid: Optional[str] = None
    frame: Optional[pd.DataFrame] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        skip = ("grid", "frame")
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name not in skip}
        return {k: v for k, v in out.items() if v is not None}

    def save(self, path: str):
        with open(path, "w") as out:
            json.dump(self.to_dict(), out, indent=2)


def sample_test_points(problem, n_test: int, seed: int) -> np.ndarray:
    """Uniform interior points, independent of every training stream"""
    child = np.random.SeedSequence(seed).spawn(TEST_STREAM + 1)[TEST_STREAM]
    return problem.domain.sample_interior(np.random.default_rng(child), n_test)


def _nrmse(u_pred, exact) -> float:
    norm = float(np.sqrt(np.sum(exact * exact)))
    if norm == 0.0:
        raise UndefinedMetricError("exact solution vanishes on all test points")
    err = u_pred - exact
    return float(np.sqrt(np.sum(err * err))) / norm


def nrmse(model, problem, n_test: int, seed: int) -> float:
    """sqrt(sum |u_pred - u|^2) / sqrt(sum |u|^2) over the test points"""
    x = sample_test_points(problem, n_test, seed)
    return _nrmse(np.asarray(model.forward(x)), problem.exact_solution(x))


def prediction_grid(model, problem, resolution: int) -> pd.DataFrame:
    """Model values on a regular grid over the closed domain"""
    points = problem.domain.grid(resolution)
    frame = pd.DataFrame(points, columns=["x{}".format(k + 1) for k in range(problem.dim)])
    frame["u_pred"] = np.asarray(model.forward(points))
    if problem.has_exact:
        frame["u_exact"] = problem.exact_solution(points)
        frame["abs_err"] = np.abs(frame["u_pred"] - frame["u_exact"])
    return frame


def value_range(problem, x=None) -> Tuple[float, float]:
    """Admissible [lo, hi] for the solution"""
    if problem.value_range is not None:
        return problem.value_range
    if problem.has_exact and x is not None:
        exact = problem.exact_solution(x)
        return float(exact.min()), float(exact.max())
    g = problem.boundary_data(problem.domain.sample_boundary(np.random.default_rng(0), 1000))
    return float(np.min(g)), float(np.max(g))


def _overshoot(problem, x, u, n_test, seed) -> EvalReport:
    lo, hi = value_range(problem, x)
    return EvalReport(
        overshoot=max(0.0, float(u.max()) - hi),
        undershoot=max(0.0, lo - float(u.min())),
        n_test=n_test,
        seed=seed,
    )


def overshoot_report(model, problem, n_test: int, seed: int) -> EvalReport:
    x = sample_test_points(problem, n_test, seed)
    return _overshoot(problem, x, np.asarray(model.forward(x)), n_test, seed)


def evaluate(model, problem, n_test: int, seed: int, resolution: int, out_dir: str = None) -> EvalReport:
    """Full report; writes metrics.json and prediction_grid.csv into `out_dir`

    The prediction grid is kept on `report.frame` whenever it was written.
    """
    x = sample_test_points(problem, n_test, seed)
    u = np.asarray(model.forward(x))
    report = _overshoot(problem, x, u, n_test, seed)
    if problem.has_exact:
        exact = problem.exact_solution(x)
        report.nrmse = _nrmse(u, exact)
        report.max_abs_error = float(np.max(np.abs(u - exact)))
        logger.info("nrmse=%.4e max_abs_error=%.4e", report.nrmse, report.max_abs_error)
    else:
        logger.info("overshoot=%.4g undershoot=%.4g", report.overshoot, report.undershoot)

    if out_dir:
        report.frame = prediction_grid(model, problem, resolution)
        report.grid = os.path.join(out_dir, GRID_FILE)
        report.frame.to_csv(report.grid, index=False, float_format="%.17g")
        report.save(os.path.join(out_dir, METRICS_FILE))
    return report
