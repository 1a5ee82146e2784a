"""Utility functions and classes used throughout cdrpinn"""
import itertools
import logging
import sys
from pprint import pformat
from typing import Dict, List, Tuple

import numpy as np


class CdrPinnError(Exception):
    """Base class of every error raised by cdrpinn"""

    exit_code = 1


class ConfigurationError(CdrPinnError):
    """Invalid configuration, dimensions, preset or override"""


class DomainError(CdrPinnError):
    """Point outside the domain, or an operation the problem does not support"""


class UndefinedMetricError(CdrPinnError):
    """Metric is undefined for the given data"""


class ArtifactError(CdrPinnError):
    """Missing or corrupt run artifacts"""


class InvariantError(CdrPinnError):
    """A checked training invariant was violated during a run"""


class TrainingDivergenceError(CdrPinnError):
    """Loss or gradient became non-finite

    Attributes:
        sample: offending sample point, when known
        model: last model with finite parameters (attached by the trainer)
        log: training log up to the failure (attached by the trainer)
    """

    exit_code = 2

    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample
        self.model = None
        self.log = None


_COLORS = dict(
    DEBUG="\033[0;37m",
    INFO="\033[1;35m",
    WARNING="\033[1;33m",
    ERROR="\033[0;31m",
    CRITICAL="\033[0;31m",
)


class _PrefixFormatter(logging.Formatter):
    def format(self, record):
        source = getattr(record, "source", record.name)
        color = _COLORS.get(record.levelname, "")
        return "{}[{}]:\033[0m {}".format(color, source, record.getMessage())


def get_logger(name: str) -> logging.Logger:
    """Logger under the cdrpinn namespace, printing `[source]: message` lines"""
    root = logging.getLogger("cdrpinn")
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(_PrefixFormatter())
        root.addHandler(handler)
        root.setLevel(logging.INFO)
        root.propagate = False
    if name == "cdrpinn" or name.startswith("cdrpinn."):
        return logging.getLogger(name)
    return logging.getLogger("cdrpinn." + name)


def set_verbosity(debug: bool):
    get_logger("cdrpinn").setLevel(logging.DEBUG if debug else logging.INFO)


def error(strn: str, code: int = 1):
    print("\033[0;31m[Error]:\033[0m {}".format(strn), file=sys.stderr)
    sys.exit(code)


class Metrics:
    """Per-seed samples of named metrics, plus constants naming their group

    Example:
        >>> stats = Metrics(problem="P1D", method="curriculum")
        >>> stats.add_metrics("nrmse", [0.01, 0.03])
        >>> stats.get_stats()
        {'problem': 'P1D', 'method': 'curriculum', 'nrmse': 0.02, 'nrmse_std': 0.01, 'nrmse_n': 2}
    """

    def __init__(self, **constants):
        self.constants = dict(constants)
        self.samples: Dict[str, List[float]] = {}

    def add_metric(self, key, val):
        """Record one sample; None and NaN are skipped"""
        if val is None or np.isnan(val):
            return
        self.samples.setdefault(key, []).append(float(val))

    def add_metrics(self, key, vals):
        for val in vals:
            self.add_metric(key, val)

    def get_stats(self) -> Dict:
        """Constants, then mean, population std (`_std`) and count (`_n`) per metric"""
        stats = dict(self.constants)
        for key, vals in self.samples.items():
            arr = np.asarray(vals)
            stats[key] = float(arr.mean())
            stats[key + "_std"] = float(arr.std())
            stats[key + "_n"] = arr.size
        return stats

    def __repr__(self):
        return pformat(self.get_stats())


def retrieve_obj(file: str) -> Dict[str, str]:
    """Retrieve dictionary from file key=val

    Blank lines and `#` comments are ignored. Values stay strings; typing
    is the job of the consumer (see `TrainConfig.from_mapping`).
    """
    obj = {}
    with open(file, "r") as ofile:
        for lineno, line in enumerate(ofile, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(
                    "{}:{}: expected key=value, got '{}'".format(file, lineno, line)
                )
            key, val = line.split("=", 1)
            key = key.strip()
            if key in obj:
                raise ConfigurationError(
                    "{}:{}: duplicate key '{}'".format(file, lineno, key)
                )
            obj[key] = val.strip()
    return obj


class Variables:
    """Config keys of a preset: constants plus swept (key, values) pairs

    Attributes:
        consts: config keys shared by every run
        var: (config key, values) pairs; see `produce_args`
    """

    def __init__(self, consts: Dict = None, var: List[Tuple[str, List]] = None) -> None:
        self.consts = dict(consts or {})
        self.var = [(key, list(values)) for key, values in (var or [])]
        swept = [key for key, _ in self.var]
        if len(set(swept)) != len(swept):
            raise ConfigurationError("key swept twice: {}".format(", ".join(swept)))
        both = set(swept) & set(self.consts)
        if both:
            raise ConfigurationError("key both constant and swept: {}".format(", ".join(sorted(both))))

    def produce_args(self) -> List[Dict]:
        """One mapping per point of the sweep, last key varying fastest

        Example:
            >>> Variables({"problem": "P1D"}, [("G", [1, 10]), ("seed", [0, 1])]).produce_args()
            [{'problem': 'P1D', 'G': 1, 'seed': 0}, {'problem': 'P1D', 'G': 1, 'seed': 1},
             {'problem': 'P1D', 'G': 10, 'seed': 0}, {'problem': 'P1D', 'G': 10, 'seed': 1}]
        """
        keys = [key for key, _ in self.var]
        return [
            {**self.consts, **dict(zip(keys, combo))}
            for combo in itertools.product(*(values for _, values in self.var))
        ]

    def __len__(self):
        return len(self.produce_args())

    def __repr__(self) -> str:
        return pformat(vars(self), width=30)
