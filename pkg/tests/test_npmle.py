import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import pg_simplex_npmle
from mixdens import kernels, npmle
from mixdens.npmle import DiscreteMixingDistribution, SupportGrid


def test_grid_validation():
    with pytest.raises(ValueError):
        SupportGrid(np.array([1.0]))
    with pytest.raises(ValueError):
        SupportGrid(np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        SupportGrid(np.array([2.0, 1.0]))
    g = SupportGrid(np.linspace(0, 1, 5))
    assert g.count == 5


def test_distribution_validation():
    with pytest.raises(ValueError):
        DiscreteMixingDistribution(np.array([1.0, 1.0]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        DiscreteMixingDistribution(np.array([1.0, 2.0]), np.array([0.6, 0.6]))
    d = DiscreteMixingDistribution(np.array([0.0, 1.0]), np.array([0.25, 0.75]))
    assert d.mean() == pytest.approx(0.75)
    np.testing.assert_allclose(d.cdf([-1.0, 0.0, 0.5, 1.0, 2.0]),
                               [0.0, 0.25, 0.25, 1.0, 1.0])


def test_distribution_json_round_trip():
    d = DiscreteMixingDistribution(np.array([0.1, 2.3]), np.array([0.4, 0.6]),
                                   loglik=-12.5, optimality=1.0005)
    d2 = DiscreteMixingDistribution.from_json(d.to_json())
    np.testing.assert_array_equal(d.atoms, d2.atoms)
    np.testing.assert_array_equal(d.weights, d2.weights)
    assert d2.loglik == -12.5 and d2.optimality == 1.0005


def test_default_grid_rules():
    gauss = npmle.default_grid(np.array([-5.0, 5.0]), kernels.gaussian(), 3)
    np.testing.assert_allclose(gauss.points, [-6.0, 0.0, 6.0])
    unit = npmle.default_grid(np.array([2.0, 5.0]), kernels.binomial(), 2)
    np.testing.assert_allclose(unit.points, [1e-3, 1.0 - 1e-3])
    y = np.random.default_rng(0).poisson(3.0, size=200).astype(float)
    pois = npmle.default_grid(y, kernels.poisson())
    assert pois.points[0] <= 1e-3 + 1e-12
    assert pois.points[-1] >= y.max() + 3.0 * np.sqrt(y.max()) - 1e-9
    with pytest.raises(ValueError):
        npmle.default_grid(np.array([1.0]), kernels.gaussian(), 1)


def test_single_observation_concentrates_at_nearest_grid_point():
    k = kernels.gaussian()
    grid = SupportGrid(np.linspace(-3.0, 3.0, 21))
    d = npmle.fit_weighted_npmle(np.array([2.0]), np.array([1.0]), k, grid,
                                 tol=1e-13, max_iter=20_000)
    assert d.atoms.size == 1
    assert d.atoms[0] == pytest.approx(2.1)  # closest candidate to y=2.0
    assert d.weights[0] == 1.0


def _toy_instance():
    k = kernels.gaussian()
    y = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    w = np.ones(5)
    grid = SupportGrid(np.linspace(-3.0, 3.0, 21))
    return y, w, k, grid


def test_em_matches_projected_gradient_oracle():
    y, w, k, grid = _toy_instance()
    d = npmle.fit_weighted_npmle(y, w, k, grid, tol=1e-12, max_iter=20_000)
    A, _ = npmle._scaled_likelihood(y, k, grid.points)
    pi_star, _ = pg_simplex_npmle(A, w)
    full = np.zeros(grid.count)
    full[np.searchsorted(grid.points, d.atoms)] = d.weights
    assert np.max(np.abs(full - pi_star)) < 1e-4
    d_star = DiscreteMixingDistribution(grid.points[pi_star > 1e-12],
                                        pi_star[pi_star > 1e-12]
                                        / pi_star[pi_star > 1e-12].sum())
    ll_star = npmle.marginal_log_likelihood(y, w, k, d_star)
    assert abs(d.loglik - ll_star) < 1e-6


def test_weight_scaling_leaves_fit_unchanged():
    y, w, k, grid = _toy_instance()
    base = npmle.fit_weighted_npmle(y, w, k, grid)
    doubled = npmle.fit_weighted_npmle(y, 2.0 * w, k, grid)
    np.testing.assert_array_equal(base.atoms, doubled.atoms)
    np.testing.assert_array_equal(base.weights, doubled.weights)
    scaled = npmle.fit_weighted_npmle(y, 3.0 * w, k, grid)
    np.testing.assert_allclose(base.weights, scaled.weights, rtol=1e-9)


def test_duplication_with_halved_weights_is_identical():
    y, w, k, grid = _toy_instance()
    base = npmle.fit_weighted_npmle(y, w, k, grid)
    dup = npmle.fit_weighted_npmle(np.concatenate([y, y]),
                                   np.full(2 * y.size, 0.5), k, grid)
    np.testing.assert_array_equal(base.atoms, dup.atoms)
    np.testing.assert_array_equal(base.weights, dup.weights)


def test_fit_validates_inputs():
    y, w, k, grid = _toy_instance()
    with pytest.raises(ValueError):
        npmle.fit_weighted_npmle(y, w[:-1], k, grid)
    with pytest.raises(ValueError):
        npmle.fit_weighted_npmle(y, -w, k, grid)
    with pytest.raises(ValueError):
        npmle.fit_weighted_npmle(y, w, k, grid, tol=0.0)


def test_uncovered_observation_raises():
    k = kernels.poisson()
    grid = SupportGrid(np.linspace(1.0, 5.0, 9))
    y = np.array([2.0, 1e308])  # lgamma overflow kills every grid column
    with pytest.raises(RuntimeError, match="grid does not cover"):
        npmle.fit_weighted_npmle(y, np.ones(2), k, grid)


def test_marginal_log_likelihood_oracles():
    k = kernels.gaussian()
    y = np.array([-1.0, 0.5, 2.0])
    w = np.ones(3)
    one = DiscreteMixingDistribution(np.array([0.3]), np.array([1.0]))
    assert npmle.marginal_log_likelihood(y, w, k, one) == pytest.approx(
        float(kernels.log_density(k, y, 0.3).sum()), abs=1e-12)
    # naive non-log-space evaluation
    d = DiscreteMixingDistribution(np.array([-0.5, 1.0]), np.array([0.3, 0.7]))
    naive = sum(
        wi * np.log(0.3 * np.exp(kernels.log_density(k, yi, -0.5))
                    + 0.7 * np.exp(kernels.log_density(k, yi, 1.0)))
        for yi, wi in zip(y, w))
    assert npmle.marginal_log_likelihood(y, w, k, d) == pytest.approx(
        naive, abs=1e-10)


def test_optimality_measure_certifies_and_detects():
    k = kernels.gaussian()
    y = np.array([-1.0, 1.0])
    w = np.ones(2)
    grid = SupportGrid(np.array([-1.0, 1.0]))
    d = npmle.fit_weighted_npmle(y, w, k, grid, tol=1e-14, max_iter=50_000)
    assert npmle.optimality_measure(y, w, k, d, grid) == pytest.approx(1.0, abs=1e-6)
    # a point mass far from the data scores far above 1
    far = DiscreteMixingDistribution(np.array([10.0]), np.array([1.0]))
    assert npmle.optimality_measure(y, w, k, far, grid) > 10.0
    # the measure is scale-free in w
    m1 = npmle.optimality_measure(y, w, k, d, grid)
    m2 = npmle.optimality_measure(y, 5.0 * w, k, d, grid)
    assert m1 == pytest.approx(m2, rel=1e-12)


def test_debug_mode_asserts_monotone_loglik():
    y, w, k, grid = _toy_instance()
    d = npmle.fit_weighted_npmle(y, w, k, grid, debug=True)
    assert abs(d.weights.sum() - 1.0) < 1e-12


@given(seed=st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_random_instances_certify(seed):
    rng = np.random.default_rng(seed)
    k = kernels.gaussian()
    y = rng.normal(0.0, 2.0, size=rng.integers(2, 30))
    w = rng.uniform(0.2, 2.0, size=y.size)
    grid = npmle.default_grid(y, k, 80)
    d = npmle.fit_weighted_npmle(y, w, k, grid, tol=1e-10, max_iter=20_000, debug=True)
    assert abs(d.weights.sum() - 1.0) < 1e-12
    assert d.optimality <= 1.0 + 1e-3
    assert np.all(np.diff(d.atoms) > 0)
