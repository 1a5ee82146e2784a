"""Core API calls and classes for cdrpinn

Presets are planned with `plan_preset` (see `cdrpinn.presets`) into the
registry global; the cli expands them into run configurations, executes the
runs into disjoint directories and summarizes their artifacts.
"""
import json
import os
from multiprocessing import Pool
from typing import Dict, List, Sequence

import pandas as pd

from .diagnostics import run_diagnostics
from .globals import DEFAULT_OUTPUT, GRAPHS, OUTPUT_ENV, _cp_presets
from .graphing import plot_loss_history, plot_prediction
from .metrics import METRICS_FILE, evaluate
from .problems import make_problem
from .trainer import META_FILE, TrainConfig, train
from .util import ArtifactError, CdrPinnError, ConfigurationError, Metrics, Variables, get_logger

logger = get_logger(__name__)

SUMMARY_FILE = "summary.csv"
COMPARISON_FILE = "comparison.csv"
SUMMARY_COLUMNS = [
    "problem", "epsilon", "method", "G", "K", "iterations", "seed",
    "nrmse", "max_abs_error", "overshoot", "undershoot", "wall_s", "run_dir",
]


class ExperimentPreset:
    """Named sweep of run configurations, see plan_preset documentation"""

    def __init__(self, name: str, variables: Variables, description: str = "", experiment: str = None):
        self.name = name
        self.variables = variables
        self.description = description
        self.experiment = experiment

    def configs(self, overrides: Dict = None, full_scale: bool = False) -> List[TrainConfig]:
        """Resolved configurations; overrides win over the preset's values"""
        overrides = dict(overrides or {})
        configs = []
        for args in self.variables.produce_args():
            args = dict(args)
            args.update(overrides)
            if full_scale:
                args["full_scale"] = True
                if "iterations" not in overrides:
                    args.pop("iterations", None)
            configs.append(TrainConfig.from_mapping(args).resolve())
        if not configs:
            raise ConfigurationError("preset {} expands to no runs".format(self.name))
        return configs

    def __repr__(self):
        return "ExperimentPreset({}, {} runs)".format(
            self.name, len(self.variables.produce_args())
        )


def plan_preset(name: str, consts: Dict = None, var=None, description: str = "", experiment: str = None):
    """Plan a preset

    Args:
        name (str): Stable preset name used on the command line
        consts (Dict): Config keys shared by every run
        var (List): (config key, values) pairs swept over, see
            `util.Variables.produce_args`
        description (str): One line for `list-presets`
        experiment (str, optional): Diagnostic experiment to run instead of
            plain training runs

    Example:
        >>> plan_preset(
        >>>     "sensitivity_G",
        >>>     dict(problem="P1D", epsilon=1e-9),
        >>>     [("G", [1, 10, 20, 30])],
        >>> )
    """
    if name in _cp_presets:
        raise ConfigurationError("preset {} planned twice".format(name))
    _cp_presets[name] = ExperimentPreset(name, Variables(consts, var), description, experiment)
    return _cp_presets[name]


def get_preset(name: str) -> ExperimentPreset:
    from . import presets  # noqa: F401  fills the registry

    if name not in _cp_presets:
        raise ConfigurationError(
            "unknown preset '{}'; see `cdrpinn list-presets`".format(name)
        )
    return _cp_presets[name]


def list_presets() -> List[ExperimentPreset]:
    from . import presets  # noqa: F401

    return [_cp_presets[k] for k in sorted(_cp_presets)]


def output_root(out: str = None) -> str:
    """--out, else $CDRPINN_OUTPUT, else ./runs"""
    return out or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT


def execute_run(cfg: TrainConfig, out_dir: str) -> str:
    """Train, evaluate and plot one configuration into `out_dir`"""
    os.makedirs(out_dir, exist_ok=True)
    problem = make_problem(cfg.problem, cfg.epsilon, rot_outer_bc=cfg.rot_outer_bc)
    model, log = train(cfg, out_dir=out_dir)
    report = evaluate(model, problem, cfg.n_test, cfg.seed, cfg.grid_resolution, out_dir=out_dir)
    plot_loss_history(log.to_frame(), os.path.join(out_dir, GRAPHS["loss"]))
    plot_prediction(report.frame, problem.dim, os.path.join(out_dir, GRAPHS["prediction"]))
    return out_dir


def _job(args):
    mapping, out_dir = args
    try:
        execute_run(TrainConfig.from_mapping(mapping), out_dir)
    except CdrPinnError as err:
        return out_dir, err.exit_code, str(err)
    return out_dir, 0, ""


def _run_dir(root: str, cfg: TrainConfig, used: set) -> str:
    base = os.path.join(root, cfg.run_name())
    path, i = base, 1
    while path in used:
        path = "{}_{}".format(base, i)
        i += 1
    used.add(path)
    return path


def execute_configs(configs: Sequence[TrainConfig], root: str, jobs: int = 1) -> int:
    """Run every configuration; returns the worst exit code"""
    used = set()
    work = [(cfg.to_mapping(), _run_dir(root, cfg, used)) for cfg in configs]
    if jobs > 1 and len(work) > 1:
        with Pool(min(jobs, len(work))) as pool:
            results = pool.map(_job, work)
    else:
        results = [_job(w) for w in work]

    code = 0
    for out_dir, status, message in results:
        if status:
            logger.error("%s failed: %s", out_dir, message)
        code = max(code, status)
    dirs = [out_dir for out_dir, status, _ in results if status == 0]
    if dirs:
        frame = summarize(dirs)
        frame.to_csv(os.path.join(root, SUMMARY_FILE), index=False)
        comparison(frame).to_csv(os.path.join(root, COMPARISON_FILE), index=False)
    return code


def execute_preset(preset: ExperimentPreset, overrides: Dict, out: str = None, jobs: int = 1,
                   full_scale: bool = False) -> int:
    root = os.path.join(output_root(out), preset.name)
    configs = preset.configs(overrides, full_scale)
    logger.info("%d run(s) into %s", len(configs), root, extra=dict(source=preset.name))
    if preset.experiment:
        for cfg in configs:
            run_diagnostics(cfg, preset.experiment, os.path.join(root, cfg.run_name()))
        return 0
    return execute_configs(configs, root, jobs)


def _read_json(run_dir: str, name: str) -> Dict:
    path = os.path.join(run_dir, name)
    try:
        with open(path) as src:
            return json.load(src)
    except FileNotFoundError:
        raise ArtifactError("{}: missing {}".format(run_dir, name)) from None
    except json.JSONDecodeError as err:
        raise ArtifactError("{}: corrupt {} ({})".format(run_dir, name, err)) from None


def summarize(run_dirs: Sequence[str]) -> pd.DataFrame:
    """One row per run directory, sorted by (problem, epsilon)"""
    rows, bad = [], []
    for run_dir in run_dirs:
        try:
            meta = _read_json(run_dir, META_FILE)
            metrics = _read_json(run_dir, METRICS_FILE)
            config = meta["config"]
        except (ArtifactError, KeyError) as err:
            bad.append(str(err))
            continue
        rows.append(dict(
            problem=config["problem"],
            epsilon=config["epsilon"],
            method=meta.get("method", "curriculum" if config.get("curriculum") else "pinn"),
            G=config.get("G"),
            K=config.get("K"),
            iterations=config.get("iterations"),
            seed=meta.get("seed"),
            nrmse=metrics.get("nrmse"),
            max_abs_error=metrics.get("max_abs_error"),
            overshoot=metrics.get("overshoot"),
            undershoot=metrics.get("undershoot"),
            wall_s=meta.get("wall_s"),
            run_dir=run_dir,
        ))
    if bad:
        raise ArtifactError("unusable run directories:\n  " + "\n  ".join(bad))
    frame = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
    return frame.sort_values(["problem", "epsilon"], ascending=[True, False], kind="stable").reset_index(drop=True)


def comparison(summary: pd.DataFrame) -> pd.DataFrame:
    """Seed-averaged metrics per (problem, epsilon, G, method)"""
    keys = ["problem", "epsilon", "G", "method"]
    groups = []
    for key, rows in summary.groupby(keys, sort=True):
        metrics = Metrics(**dict(zip(keys, key)))
        for col in ("nrmse", "overshoot", "undershoot", "wall_s"):
            metrics.add_metrics(col, [v for v in rows[col] if pd.notna(v)])
        groups.append(metrics.get_stats())
    return pd.DataFrame(groups)
