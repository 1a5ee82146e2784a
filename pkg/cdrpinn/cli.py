"""CLI Module

This module processes and handles all command line interface input
and dispatches commands to the proper area
"""
import os
import sys
from argparse import SUPPRESS, ArgumentParser
from typing import Dict, List, Tuple

from .core import (
    execute_configs,
    execute_preset,
    get_preset,
    list_presets,
    output_root,
    summarize,
    SUMMARY_FILE,
)
from .diagnostics import EXPERIMENTS, run_diagnostics
from .trainer import TrainConfig, load_run_config
from .util import CdrPinnError, ConfigurationError, error, get_logger, retrieve_obj, set_verbosity

logger = get_logger("cli")


def parse_overrides(tokens: List[str]) -> Dict[str, str]:
    """`key=value` and `--key=value` tokens into a mapping

    A key given twice with different values is a conflict.
    """
    overrides = {}
    for token in tokens:
        text = token[2:] if token.startswith("--") else token
        if "=" not in text:
            raise ConfigurationError("expected key=value, got '{}'".format(token))
        key, value = text.split("=", 1)
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key in overrides and overrides[key] != value:
            raise ConfigurationError(
                "conflicting overrides for {}: '{}' and '{}'".format(key, overrides[key], value)
            )
        overrides[key] = value
    TrainConfig.from_mapping(overrides)
    return overrides


def load_target(target: str, overrides: Dict) -> Tuple[str, List[TrainConfig]]:
    """Config file or run_meta.json into (run group name, configs)"""
    if target.endswith(".json"):
        cfg = load_run_config(target)
        return "replay_" + cfg.run_name(), [cfg.merged(overrides).resolve()]
    mapping = retrieve_obj(target)
    mapping.update(overrides)
    name = os.path.splitext(os.path.basename(target))[0]
    return name, [TrainConfig.from_mapping(mapping).resolve()]


def _run(args, overrides) -> int:
    if os.path.isfile(args.target):
        if args.full_scale:
            overrides.setdefault("full_scale", "on")
        name, configs = load_target(args.target, overrides)
        root = os.path.join(output_root(args.out), name)
        return execute_configs(configs, root, args.jobs)
    preset = get_preset(args.target)
    return execute_preset(preset, overrides, args.out, args.jobs, args.full_scale)


def _summarize(args) -> int:
    frame = summarize(args.dirs)
    out = args.out or SUMMARY_FILE
    frame.to_csv(out, index=False)
    logger.info("%d row(s) written to %s", len(frame), out, extra=dict(source="summarize"))
    return 0


def _diagnose(args, overrides) -> int:
    mapping = dict(problem="P1D", epsilon=1e-3, curriculum=False)
    mapping.update(overrides)
    cfg = TrainConfig.from_mapping(mapping)
    run_diagnostics(cfg, args.experiment, os.path.join(output_root(args.out), args.experiment))
    return 0


def _list_presets(_args) -> int:
    for preset in list_presets():
        print("{:<24} {:>3} run(s)  {}".format(
            preset.name, len(preset.variables), preset.description
        ))
    return 0


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="cdrpinn",
        description="Curriculum-regularized PINN training for convection-diffusion-reaction problems",
        allow_abbrev=False,
    )
    parser.add_argument("--debug", action="store_true", help="Log threshold updates and densification rounds")
    verbs = parser.add_subparsers(dest="verb", required=True)

    run = verbs.add_parser("run", help="Run a preset, a key=value config file or a run_meta.json",
                           allow_abbrev=False)
    run.add_argument("target", help="Preset name or config path")
    run.add_argument("--out", help="Output root (default $CDRPINN_OUTPUT or ./runs)")
    run.add_argument("--jobs", type=int, default=1, help="Runs executed concurrently")
    run.add_argument("--full-scale", action="store_true", help="Use the full iteration budgets")
    run.add_argument("--debug", action="store_true", default=SUPPRESS)

    summ = verbs.add_parser("summarize", help="Collect run directories into summary.csv")
    summ.add_argument("dirs", nargs="+", help="Run directories")
    summ.add_argument("--out", help="Output CSV (default ./summary.csv)")

    diag = verbs.add_parser("diagnose", help="Run a failure-mode experiment", allow_abbrev=False)
    diag.add_argument("experiment", choices=EXPERIMENTS)
    diag.add_argument("--out", help="Output root (default $CDRPINN_OUTPUT or ./runs)")
    diag.add_argument("--debug", action="store_true", default=SUPPRESS)

    verbs.add_parser("list-presets", help="List preset names")
    return parser


def cli_entry(argv: List[str] = None) -> int:
    """Main entry point for the command line interface; returns the exit code"""
    parser = build_parser()
    args, rest = parser.parse_known_args(argv)
    set_verbosity(args.debug)

    try:
        if args.verb in ("run", "diagnose"):
            overrides = parse_overrides(rest)
        elif rest:
            parser.error("unrecognized arguments: {}".format(" ".join(rest)))
        if args.verb == "run":
            return _run(args, overrides)
        if args.verb == "diagnose":
            return _diagnose(args, overrides)
        if args.verb == "summarize":
            return _summarize(args)
        return _list_presets(args)
    except CdrPinnError as err:
        error(str(err), err.exit_code)
    except KeyboardInterrupt:
        error("interrupted", 130)
    return 1


def main():
    sys.exit(cli_entry())
