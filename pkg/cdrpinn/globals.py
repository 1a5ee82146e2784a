"""Module to hold all the globals used within cdrpinn

The preset registry is filled by `core.plan_preset` when `cdrpinn.presets`
is imported, and read by the cli verbs.
"""

VERSION = "0.1.0"

_cp_presets = {}

DEFAULT_SIZE = (3.4, 2.8)
"""Figure size in inches for every plot"""

OUTPUT_ENV = "CDRPINN_OUTPUT"
"""str: environment variable naming the artifact root"""

DEFAULT_OUTPUT = "runs"
"""str: default artifact root, relative to the working directory"""

GRAPHS = dict(loss="loss_history.svg", prediction="prediction.svg")
"""Plot file names written into every run directory"""


# Architecture and sampling defaults, one row per benchmark. Depth counts hidden layers.
BENCHMARK_DEFAULTS = {
    "P1D": dict(
        depth=3, width=20, batch_size=50, lr=1e-3, iterations=150_000,
        reduced_iterations=50_000, n_interior=2_500, n_boundary=2, G=10.0,
        densify=False,
    ),
    "P2D_BL": dict(
        depth=5, width=20, batch_size=200, lr=1e-2, iterations=1_500_000,
        reduced_iterations=100_000, n_interior=20_000, n_boundary=400, G=50.0,
        densify=True,
    ),
    "P2D_IL": dict(
        depth=3, width=20, batch_size=200, lr=1e-2, iterations=1_000_000,
        reduced_iterations=100_000, n_interior=20_000, n_boundary=400, G=50.0,
        densify=True,
    ),
    "P2D_L": dict(
        depth=3, width=20, batch_size=200, lr=1e-2, iterations=1_000_000,
        reduced_iterations=100_000, n_interior=20_000, n_boundary=400, G=50.0,
        densify=True,
    ),
    "P2D_ROT": dict(
        depth=3, width=20, batch_size=200, lr=5e-3, iterations=1_500_000,
        reduced_iterations=100_000, n_interior=20_000, n_boundary=400, G=50.0,
        densify=True,
    ),
    "P3D": dict(
        depth=5, width=20, batch_size=500, lr=1e-2, iterations=1_000_000,
        reduced_iterations=20_000, n_interior=300_000, n_boundary=60_000, G=50.0,
        densify=True,
    ),
}

N_TEST = {1: 1000, 2: 5000, 3: 5000}
"""Test points for NRMSE per spatial dimension"""

GRID_RESOLUTION = {1: 1001, 2: 101, 3: 21}
"""Prediction grid points per axis"""
