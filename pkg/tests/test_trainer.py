import json
import os

import numpy as np
import pandas as pd
import pytest

from cdrpinn import trainer
from cdrpinn.autodiff import _tape as T
from cdrpinn.autodiff import param_gradient
from cdrpinn.network import MlpModel, init_xavier
from cdrpinn.optim import Optimizer
from cdrpinn.problems import make_problem
from cdrpinn.sampling import MinibatchSampler, sample_uniform
from cdrpinn.trainer import (
    CHECKPOINT_FILE,
    LOG_COLUMNS,
    LOG_FILE,
    META_FILE,
    TRAIN_SET_FILE,
    TrainConfig,
    TrainingLog,
    load_run_config,
    seed_streams,
    train,
)
from cdrpinn.util import ConfigurationError, InvariantError, TrainingDivergenceError


def _tiny(**changes):
    base = dict(problem="P1D", epsilon=1e-2, iterations=60, n_interior=120, batch_size=20, log_period=10)
    base.update(changes)
    return TrainConfig.from_mapping(base)


def test_config_coercion():
    cfg = TrainConfig.from_mapping(
        {"problem": "p1d", "epsilon": "1e-6", "curriculum": "off", "iterations": "1e3", "lambda": "2"}
    )
    assert cfg.epsilon == 1e-6
    assert cfg.curriculum is False
    assert cfg.iterations == 1000
    assert cfg.lam == 2.0
    assert cfg.method == "pinn"
    assert cfg.resolve().problem == "P1D"


@pytest.mark.parametrize(
    "mapping",
    [{"epsilon": "tiny"}, {"curriculum": "maybe"}, {"iterations": "1.5"}, {"momentum": "0.9"}],
)
def test_config_rejects_bad_values(mapping):
    with pytest.raises(ConfigurationError):
        TrainConfig.from_mapping(mapping)


def test_resolve_fills_benchmark_defaults():
    cfg = TrainConfig(problem="P1D").resolve()
    assert (cfg.depth, cfg.width, cfg.batch_size, cfg.lr) == (3, 20, 50, 1e-3)
    assert (cfg.n_interior, cfg.n_boundary, cfg.G, cfg.densify) == (2500, 2, 10.0, False)
    assert cfg.iterations == 50_000
    assert TrainConfig(problem="P1D", full_scale=True).resolve().iterations == 150_000
    bl = TrainConfig(problem="P2D_BL").resolve()
    assert (bl.depth, bl.batch_size, bl.lr, bl.G, bl.densify) == (5, 200, 1e-2, 50.0, True)
    assert TrainConfig(problem="P3D").resolve().n_boundary == 60_000


@pytest.mark.parametrize(
    "changes",
    [dict(epsilon=0.0), dict(iterations=0), dict(optimizer="rmsprop"), dict(subset_fraction=1.5), dict(G=-1.0)],
)
def test_resolve_validates(changes):
    with pytest.raises(ConfigurationError):
        TrainConfig(**changes).resolve()


def test_config_mapping_uses_file_keys():
    mapping = TrainConfig(lam=0.5).to_mapping()
    assert "lambda" in mapping and "lam" not in mapping
    assert set(TrainConfig.keys()) == set(mapping)
    assert TrainConfig.from_mapping(mapping) == TrainConfig(lam=0.5)
    assert TrainConfig().merged({"seed": "4"}).seed == 4


def test_seed_streams_are_reproducible_and_distinct():
    a, b = seed_streams(3), seed_streams(3)
    draws = {k: np.random.default_rng(v).integers(1 << 62) for k, v in a.items()}
    assert draws == {k: np.random.default_rng(v).integers(1 << 62) for k, v in b.items()}
    assert len(set(draws.values())) == len(draws)


def test_log_iterations_increase():
    log = TrainingLog()
    log.append(0, 1.0, 1.0, 0.1, np.inf, 0.0)
    with pytest.raises(ValueError):
        log.append(0, 1.0, 1.0, 0.1, np.inf, 0.0)


def test_curriculum_off_is_a_plain_pinn():
    iterations = 500
    cfg = TrainConfig(problem="P1D", epsilon=1e-3, iterations=iterations, curriculum=False, log_period=1)
    model, log = train(cfg)
    cfg = cfg.resolve()

    # the same run assembled by hand from the building blocks
    problem = make_problem("P1D", 1e-3)
    seeds = seed_streams(cfg.seed)
    ts = sample_uniform(problem, cfg.n_interior, cfg.n_boundary, seeds["sampling"])
    ref = init_xavier(1, cfg.depth, cfg.width, "normal", seed=cfg.seed)
    opt = Optimizer("adam", ref, cfg.lr)
    sampler = MinibatchSampler(ts.n_interior, cfg.batch_size, seeds["batches"])
    losses = []
    for _ in range(iterations):
        x = ts.interior[sampler.next()]

        def closure(params):
            u, du, d2u = ref.jets(x, params=params)
            r = problem.residual_from_jets(x, u, du, d2u)
            l_phys = T.mean(r * r)
            rb = problem.boundary_residual(ref, ts.boundary, check=False, params=params)
            losses.append(float(T.value_of(l_phys)))
            return l_phys + cfg.lam * T.mean(rb * rb)

        opt.step(ref, param_gradient(ref, closure))

    assert log.to_frame()["L_phys_w"].tolist() == losses
    for p, q in zip(model.parameters(), ref.parameters()):
        np.testing.assert_array_equal(p, q)
    assert np.all(np.isinf(log.to_frame()["beta"]))


def test_training_writes_artifacts(tmp_path):
    out = str(tmp_path)
    model, log = train(_tiny(), out_dir=out)
    for name in (LOG_FILE, CHECKPOINT_FILE, META_FILE, TRAIN_SET_FILE):
        assert os.path.isfile(os.path.join(out, name))

    frame = pd.read_csv(os.path.join(out, LOG_FILE))
    assert list(frame.columns) == LOG_COLUMNS
    assert frame["t"].tolist() == [0, 10, 20, 30, 40, 50, 59]
    assert np.all(np.isfinite(frame["beta"]))
    pd.testing.assert_frame_equal(TrainingLog.from_csv(os.path.join(out, LOG_FILE)).to_frame(), log.to_frame())

    loaded = MlpModel.load(os.path.join(out, CHECKPOINT_FILE))
    assert all(np.array_equal(p, q) for p, q in zip(model.parameters(), loaded.parameters()))

    with open(os.path.join(out, META_FILE)) as src:
        meta = json.load(src)
    assert meta["status"] == "ok" and meta["method"] == "curriculum"
    assert meta["config"]["lambda"] == 1.0 and meta["config"]["iterations"] == 60

    points = pd.read_csv(os.path.join(out, TRAIN_SET_FILE))
    assert (points["kind"] == "interior").sum() == 120
    assert points["in_subset"].sum() == 24


def test_replay_from_run_meta(tmp_path):
    first, second = str(tmp_path / "a"), str(tmp_path / "b")
    train(_tiny(seed=5), out_dir=first)
    train(load_run_config(os.path.join(first, META_FILE)), out_dir=second)
    logs = [pd.read_csv(os.path.join(d, LOG_FILE)).drop(columns="wall_ms") for d in (first, second)]
    pd.testing.assert_frame_equal(logs[0], logs[1])


def test_beta_stays_clipping_when_checked():
    _, log = train(_tiny(iterations=300, check_invariants=True, K=10))
    beta = log.to_frame()["beta"]
    assert np.all(np.isfinite(beta)) and np.all(beta > 0)


def test_clipping_violation_is_a_run_error():
    step = trainer.StepResult(grad=None, l_phys_w=2.0, l_phys_raw=2.0, l_bc=0.0,
                              r2=np.array([0.5, 2.0]), weights=np.ones(2))
    with pytest.raises(InvariantError, match="exceeds beta"):
        trainer._check_step(step, 1.0, t=7)
    assert InvariantError("x").exit_code == 1
    trainer._check_step(step, np.inf, t=7)
    clipped = trainer.StepResult(None, 1.0, 1.25, 0.0, np.array([0.5, 2.0]), np.array([1.0, 0.5]))
    trainer._check_step(clipped, 1.0, t=7)


def test_densified_run_records_its_warmup(tmp_path):
    cfg = TrainConfig(
        problem="P2D_BL", epsilon=1e-2, depth=2, width=10, iterations=20, batch_size=20,
        n_interior=100, n_boundary=20, warmup_iterations=15, log_period=5,
    )
    model, _ = train(cfg, out_dir=str(tmp_path))
    with open(tmp_path / META_FILE) as src:
        meta = json.load(src)
    assert meta["warmup_steps"] == 15
    points = pd.read_csv(tmp_path / TRAIN_SET_FILE)
    assert (points["kind"] == "interior").sum() == 100
    assert model.is_finite()


def test_divergence_keeps_last_finite_model(tmp_path, monkeypatch):
    real_step = Optimizer.step
    calls = []

    def poisoned(self, model, grad):
        calls.append(1)
        real_step(self, model, grad)
        if len(calls) == 5:
            model.weights[0][0, 0] = np.nan
        return model

    monkeypatch.setattr(trainer.Optimizer, "step", poisoned)
    with pytest.raises(TrainingDivergenceError) as err:
        train(_tiny(log_period=1), out_dir=str(tmp_path))
    assert err.value.exit_code == 2
    assert err.value.model.is_finite()
    assert len(err.value.log) == 4
    with open(tmp_path / META_FILE) as src:
        assert json.load(src)["status"] == "diverged"


def test_training_losses_over_the_set(p1d, small_model):
    ts = sample_uniform(p1d, 200, 2, seed=0)
    full = trainer.training_losses(small_model, p1d, ts)
    tail = trainer.training_losses(small_model, p1d, ts, lo=0.5)
    assert full["L_phys"] == pytest.approx(np.mean(p1d.squared_residual(small_model, ts.interior)))
    assert tail["L_bc"] == full["L_bc"]
