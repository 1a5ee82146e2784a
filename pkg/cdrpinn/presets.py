"""Named experiment presets

Importing this module fills the preset registry. Names are stable; budgets are
reduced unless `--full-scale` is given.
"""
from .core import plan_preset

EPSILONS = [1.0, 1e-3, 1e-6, 1e-9]
LAYER_EPSILONS = [1e-3, 1e-6, 1e-9]
ON_OFF = ("curriculum", [True, False])


def eps_name(eps: float) -> str:
    """1e-06 -> 1e-6, 0.001 -> 1e-3, 1.0 -> 1"""
    mantissa, _, exponent = "{:e}".format(eps).partition("e")
    mantissa = mantissa.rstrip("0").rstrip(".")
    exponent = int(exponent)
    return mantissa if exponent == 0 else "{}e{}".format(mantissa, exponent)


# Single runs, one per benchmark
for _problem, _eps in [
    ("P1D", 1e-3),
    ("P2D_BL", 1e-3),
    ("P2D_IL", 1e-3),
    ("P2D_L", 1e-3),
    ("P2D_ROT", 1e-3),
    ("P3D", 1e-3),
]:
    plan_preset(
        _problem.lower(),
        dict(problem=_problem, epsilon=_eps),
        description="single curriculum run of {}".format(_problem),
    )

# 1D boundary layer, ours against plain PINN
for _eps in EPSILONS:
    plan_preset(
        "table3_eps" + eps_name(_eps),
        dict(problem="P1D", epsilon=_eps),
        [ON_OFF],
        description="P1D at eps={:g}, curriculum and plain PINN".format(_eps),
    )
plan_preset(
    "table3_full",
    dict(problem="P1D"),
    [("epsilon", EPSILONS), ON_OFF],
    description="P1D over every eps, curriculum and plain PINN",
)
plan_preset(
    "table3_seeds",
    dict(problem="P1D", epsilon=1e-6),
    [ON_OFF, ("seed", [0, 1, 2])],
    description="P1D at eps=1e-6 over three seeds, for comparison.csv",
)

# 2D boundary layers
for _eps in LAYER_EPSILONS:
    plan_preset(
        "table4_eps" + eps_name(_eps),
        dict(problem="P2D_BL", epsilon=_eps),
        [ON_OFF],
        description="P2D_BL at eps={:g}, curriculum and plain PINN".format(_eps),
    )
plan_preset(
    "table4_full",
    dict(problem="P2D_BL"),
    [("epsilon", LAYER_EPSILONS), ON_OFF],
    description="P2D_BL over every eps, curriculum and plain PINN",
)

for _name, _problem in [
    ("il_sweep", "P2D_IL"),
    ("lshape_sweep", "P2D_L"),
    ("rotation_sweep", "P2D_ROT"),
]:
    plan_preset(
        _name,
        dict(problem=_problem),
        [("epsilon", LAYER_EPSILONS), ON_OFF],
        description="{} over eps in 1e-3, 1e-6, 1e-9; overshoot reported".format(_problem),
    )

plan_preset(
    "table7",
    dict(problem="P3D", curriculum=True),
    [("epsilon", LAYER_EPSILONS)],
    description="P3D curriculum runs, NRMSE and wall time per eps",
)

plan_preset(
    "sensitivity_G",
    dict(problem="P1D", epsilon=1e-9, curriculum=True),
    [("G", [1, 10, 20, 30])],
    description="P1D at eps=1e-9 with G in 1, 10, 20, 30",
)

# Failure-mode study of the plain PINN
plan_preset(
    "diag_optimizers",
    dict(problem="P1D", epsilon=1e-3, curriculum=False, iterations=20000),
    [("optimizer", ["sgd", "adam"]), ("init", ["normal", "uniform"])],
    description="plain PINN on P1D, sgd/adam against normal/uniform Xavier",
)
for _experiment in ("loss_distribution", "dense_sampling", "region_rejection"):
    plan_preset(
        "diag_" + _experiment,
        dict(problem="P1D", epsilon=1e-3, curriculum=False, iterations=20000),
        description="{} diagnostic on P1D".format(_experiment.replace("_", " ")),
        experiment="dense_layer_sampling" if _experiment == "dense_sampling" else _experiment,
    )
