"""Benchmark outcomes at the reduced budgets; minutes to hours, run with --runslow"""
import numpy as np
import pytest

from cdrpinn.diagnostics import run_diagnostics
from cdrpinn.metrics import nrmse
from cdrpinn.problems import make_problem
from cdrpinn.trainer import TrainConfig, train

pytestmark = pytest.mark.slow

SEEDS = (0, 1, 2)


def _error(seed=0, **settings):
    cfg = TrainConfig(seed=seed, **settings).resolve()
    model, _ = train(cfg)
    return nrmse(model, make_problem(cfg.problem, cfg.epsilon), cfg.n_test, cfg.seed)


def _mean_error(**settings):
    return float(np.mean([_error(seed=s, **settings) for s in SEEDS]))


def test_curriculum_resolves_the_1d_layer():
    ours = _mean_error(problem="P1D", epsilon=1e-6, iterations=50_000)
    plain = _mean_error(problem="P1D", epsilon=1e-6, iterations=50_000, curriculum=False)
    assert ours <= 1e-2
    assert plain >= 1e-1


def test_accuracy_holds_as_epsilon_shrinks():
    reference = _mean_error(problem="P1D", epsilon=1e-6, iterations=50_000)
    for eps in (1e-3, 1e-9):
        assert _mean_error(problem="P1D", epsilon=eps, iterations=50_000) <= 5 * max(reference, 1e-4)


def test_plain_pinn_loss_concentrates_in_the_layer(tmp_path):
    cfg = TrainConfig(problem="P1D", epsilon=1e-3, iterations=20_000)
    summary = run_diagnostics(cfg, "loss_distribution", str(tmp_path / "dist"))
    assert (summary["top_decile_in_layer"] >= 0.8).all()

    rejection = run_diagnostics(cfg, "region_rejection", str(tmp_path / "cut"))
    full = rejection[rejection["variant"] == "full"]["tail_L_phys"].iloc[0]
    for cut in ("a0.05", "a0.1"):
        assert rejection[rejection["variant"] == cut]["tail_L_phys"].iloc[0] * 10 <= full


def test_threshold_gate_sensitivity():
    errors = {G: _error(problem="P1D", epsilon=1e-9, iterations=50_000, G=G) for G in (1, 10, 20, 30)}
    usable = [errors[G] for G in (10, 20, 30)]
    assert max(usable) <= 3 * min(usable)
    assert errors[1] >= 10 * errors[10]


def test_curriculum_on_the_2d_boundary_layer():
    ours = _error(problem="P2D_BL", epsilon=1e-3, iterations=100_000)
    plain = _error(problem="P2D_BL", epsilon=1e-3, iterations=100_000, curriculum=False)
    assert ours <= 5e-2
    assert ours <= plain
