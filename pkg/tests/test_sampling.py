import numpy as np
import pytest

from cdrpinn.curriculum import CurriculumState
from cdrpinn.domains import LShape, unit_cube, unit_interval, unit_square
from cdrpinn.network import init_xavier
from cdrpinn.problems import ExactEvaluator, make_problem
from cdrpinn.sampling import MinibatchSampler, TrainSet, densify, pick_subset, sample_uniform
from cdrpinn.util import ConfigurationError

ALL_PROBLEMS = ["P1D", "P2D_BL", "P2D_IL", "P2D_L", "P2D_ROT", "P3D"]


@pytest.mark.parametrize("domain", [unit_interval(), unit_square(), unit_cube(), LShape()])
def test_boundary_samples_lie_on_the_boundary(domain, rng):
    xb = domain.sample_boundary(rng, 500)
    assert xb.shape == (500, domain.dim)
    assert np.all(domain.on_boundary(xb))
    assert not np.any(domain.contains(xb))


def test_lshape_excludes_the_notch(rng):
    shape = LShape()
    x = shape.sample_interior(rng, 20000)
    assert not np.any((x[:, 0] <= 0) & (x[:, 1] <= 0))
    # rejection from the (-1, 1)^2 box keeps 3/4 of it
    box = rng.uniform(-1, 1, size=(200000, 2))
    assert 4.0 * shape.contains(box).mean() == pytest.approx(shape.measure(), rel=0.01)


def test_lshape_clamp_leaves_the_notch():
    shape = LShape()
    out = shape.clamp(np.array([[-0.1, -0.5], [-0.5, -0.1], [-2.0, 0.5]]))
    assert np.all(shape.contains(out))


def test_grid_covers_the_closure():
    grid = unit_square().grid(11)
    assert grid.shape == (121, 2)
    lgrid = LShape().grid(21)
    assert not np.any((lgrid[:, 0] < 0) & (lgrid[:, 1] < 0))


@pytest.mark.parametrize("problem_id", ALL_PROBLEMS)
def test_uniform_sets(problem_id):
    problem = make_problem(problem_id, 1e-3)
    ts = sample_uniform(problem, 300, 40, seed=3)
    assert ts.n_interior == 300 and ts.n_boundary == 40
    assert np.all(problem.domain.contains(ts.interior))
    assert np.all(problem.on_data_boundary(ts.boundary))
    again = sample_uniform(problem, 300, 40, seed=3)
    np.testing.assert_array_equal(ts.interior, again.interior)
    np.testing.assert_array_equal(ts.boundary, again.boundary)


def test_rotation_boundary_split():
    with_outer = sample_uniform(make_problem("P2D_ROT", 1e-3), 10, 100, seed=0)
    slit = make_problem("P2D_ROT", 1e-3).slit
    assert slit.contains(with_outer.boundary).sum() == 50
    slit_only = sample_uniform(make_problem("P2D_ROT", 1e-3, "none"), 10, 100, seed=0)
    assert np.all(slit.contains(slit_only.boundary))


def test_uniform_set_needs_points(p1d):
    with pytest.raises(ConfigurationError):
        sample_uniform(p1d, 0, 2, seed=0)


def test_subset_is_a_fifth_without_repeats(p1d):
    ts = sample_uniform(p1d, 2503, 2, seed=0)
    idx = pick_subset(ts, 0.2, seed=1)
    assert idx.size == 500
    assert np.unique(idx).size == idx.size
    assert np.all(np.diff(idx) > 0)
    assert idx.min() >= 0 and idx.max() < 2503
    np.testing.assert_array_equal(ts.with_subset(idx).subset, ts.interior[idx])


def test_subset_rejects_bad_input(p1d):
    ts = sample_uniform(p1d, 100, 2, seed=0)
    with pytest.raises(ConfigurationError):
        pick_subset(ts, 0.0)
    with pytest.raises(ConfigurationError):
        ts.with_subset([1, 1, 2])


def test_minibatches_cover_each_epoch():
    sampler = MinibatchSampler(100, 20, seed=0)
    for _ in range(3):
        seen = np.concatenate([sampler.next() for _ in range(5)])
        np.testing.assert_array_equal(np.sort(seen), np.arange(100))
    assert sampler.epoch == 2


def test_minibatch_larger_than_set():
    sampler = MinibatchSampler(10, 50, seed=0)
    assert next(iter(sampler)).size == 10
    with pytest.raises(ConfigurationError):
        MinibatchSampler(10, 0, seed=0)


def test_densify_grows_around_hot_points():
    problem = make_problem("P2D_BL", 1e-3)
    model = init_xavier(2, 3, 10, "normal", seed=0)
    half = sample_uniform(problem, 100, 20, seed=0)
    state = CurriculumState(G=50.0, beta=0.0)
    grown = densify(half, problem, model, state, 200, seed=1)
    assert grown.n_interior == 200
    np.testing.assert_array_equal(grown.interior[:100], half.interior)
    np.testing.assert_array_equal(grown.boundary, half.boundary)
    assert np.all(problem.domain.contains(grown.interior))
    # every new point is a small displacement of an old one
    gaps = np.linalg.norm(grown.interior[100:, None, :] - half.interior[None, :, :], axis=2).min(axis=1)
    assert np.all(gaps < 0.1)


def test_densify_concentrates_near_the_layer():
    # the eps=1e-2 solution, judged by the eps=1e-3 operator, fails only inside the layer at x = 0
    problem = make_problem("P1D", 1e-3)
    stand_in = ExactEvaluator(make_problem("P1D", 1e-2))
    half = sample_uniform(problem, 400, 2, seed=0)
    grown = densify(half, problem, stand_in, CurriculumState(G=10.0, beta=1.0), 800, seed=1)
    assert grown.n_interior == 800
    added = grown.interior[400:]
    assert np.mean(problem.layer_distance(added) < 0.1) > 0.9
    assert np.mean(problem.layer_distance(half.interior) < 0.1) < 0.2


def test_uniform_square_is_centred():
    ts = sample_uniform(make_problem("P2D_BL", 1e-3), 100000, 4, seed=11)
    np.testing.assert_allclose(ts.interior.mean(axis=0), [0.5, 0.5], atol=0.01)
    np.testing.assert_allclose(ts.interior.var(axis=0), [1 / 12, 1 / 12], atol=0.01)


def test_densify_without_hot_points_fills_uniformly(p1d, small_model, cdrpinn_log):
    half = sample_uniform(p1d, 50, 2, seed=0)
    grown = densify(half, p1d, small_model, CurriculumState(G=10.0), 120, seed=1)
    assert grown.n_interior == 120
    assert np.all(p1d.domain.contains(grown.interior))
    assert any("densified" in r.getMessage() for r in cdrpinn_log.records)


def test_train_set_frame(p1d):
    ts = sample_uniform(p1d, 10, 2, seed=0).with_subset([0, 3])
    frame = ts.to_frame()
    assert list(frame.columns) == ["x1", "kind", "in_subset"]
    assert (frame["kind"] == "interior").sum() == 10
    assert frame["in_subset"].sum() == 2
