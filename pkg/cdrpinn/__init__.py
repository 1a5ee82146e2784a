"""
**cdrpinn**: curriculum-regularized physics-informed neural networks

cdrpinn trains small fully connected networks on singularly perturbed
convection-diffusion-reaction problems. Samples whose residual exceeds an
adaptive threshold are down-weighted so the network first fits the smooth
part of the solution and is not derailed by thin boundary or interior layers.

Associated high level functions of cdrpinn are:
    `trainer.train`, `metrics.evaluate`, `core.plan_preset`, `core.summarize`
"""

from .core import plan_preset, summarize, comparison, execute_run
from .globals import VERSION
from .metrics import evaluate, nrmse
from .problems import ProblemId, make_problem
from .trainer import TrainConfig, TrainingLog, train

__version__ = VERSION

__all__ = [
    "plan_preset",
    "summarize",
    "comparison",
    "execute_run",
    "evaluate",
    "nrmse",
    "ProblemId",
    "make_problem",
    "TrainConfig",
    "TrainingLog",
    "train",
]
