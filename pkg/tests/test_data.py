"""Simulation models and count-data loaders."""

import numpy as np
import pytest
from scipy import stats

from mixdens import data
from mixdens.utils import trapezoid

ALL_MODELS = list(data.MODEL_NAMES)


def test_model_lookup():
    for name in ALL_MODELS:
        m = data.sim_model(name)
        assert m.name == name
    assert data.sim_model("GMM").name == "gmm"
    with pytest.raises(ValueError, match="unknown model"):
        data.sim_model("cauchy")


@pytest.mark.parametrize("name", ALL_MODELS)
def test_prior_sample_matches_cdf(name):
    m = data.sim_model(name)
    _, theta = data.simulate(m, 100_000, 0)
    ks = stats.kstest(theta, m.prior_cdf)
    assert ks.statistic < 0.01


def test_model_moments():
    _, th = data.simulate(data.sim_model("gmm"), 100_000, 1)
    assert abs(th.mean()) < 0.05
    _, th = data.simulate(data.sim_model("gamm"), 100_000, 1)
    assert th.mean() == pytest.approx(10.0 / 15.0, abs=0.01)
    y, _ = data.simulate(data.sim_model("pmm"), 100_000, 1)
    assert y.mean() == pytest.approx(3.0, abs=0.05)


def test_frozen_prior_values():
    gmm = data.sim_model("gmm")
    assert gmm.prior_pdf(0.0) == pytest.approx(0.017082210358922675029, rel=1e-14)
    pmm = data.sim_model("pmm")
    assert pmm.prior_cdf(3.0) == pytest.approx(0.57680991887315648468, rel=1e-14)


@pytest.mark.parametrize("name", ALL_MODELS)
def test_prior_grid_and_density(name):
    m = data.sim_model(name)
    g = data.prior_grid(m)
    assert g.size == 2001 and np.all(np.diff(g) > 0)
    dens = data.true_prior_density(m, g)
    assert trapezoid(dens.values, g) == pytest.approx(1.0, abs=1e-3)
    cdf = data.true_prior_cdf(m, g)
    assert cdf[0] == pytest.approx(0.0, abs=1e-6)
    assert cdf[-1] == pytest.approx(1.0, abs=1e-6)
    assert np.all(np.diff(cdf) >= 0)


def test_simulate_shapes_and_support():
    y, th = data.simulate(data.sim_model("pmm"), 500, 2)
    assert y.shape == th.shape == (500,)
    assert np.array_equal(y, np.round(y)) and np.all(y >= 0)
    y, _ = data.simulate(data.sim_model("gamm"), 500, 2)
    assert np.all(y > 0)
    y, _ = data.simulate(data.sim_model("bbm"), 500, 2)
    assert np.all((y >= 0) & (y <= 10))


def test_simulate_deterministic():
    m = data.sim_model("gmm")
    a = data.simulate(m, 100, 7)
    b = data.simulate(m, 100, 7)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    c = data.simulate(m, 100, 8)
    assert not np.array_equal(a[0], c[0])
    with pytest.raises(ValueError, match="at least 1"):
        data.simulate(m, 0, 7)


# -- CountDataset / load_counts --------------------------------------------------

def test_count_dataset_validation():
    d = data.CountDataset("toy", np.array([0, 3, 1]))
    assert d.n == 3
    with pytest.raises(ValueError, match="nonnegative"):
        data.CountDataset("bad", np.array([1, -2]))
    with pytest.raises(ValueError, match="nonempty"):
        data.CountDataset("bad", np.array([], dtype=int))


def test_load_counts_single_column(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("y\n3\n1\n4\n")
    d = data.load_counts(p, name="abc")
    assert d.name == "abc"
    assert np.array_equal(d.y, [3, 1, 4])


def test_load_counts_frequency_expansion(tmp_path):
    p = tmp_path / "b.csv"
    p.write_text("y,freq\n2,3\n5,1\n\n0,2\n")
    d = data.load_counts(p)
    assert d.name == str(p)
    assert np.array_equal(d.y, [2, 2, 2, 5, 0, 0])


def test_load_counts_errors(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("")
    with pytest.raises(ValueError, match="empty file"):
        data.load_counts(p)
    p.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError, match="1 or 2 columns"):
        data.load_counts(p)
    p.write_text("y,freq\n2,1\nx,1\n")
    with pytest.raises(ValueError, match="row 3: cannot parse"):
        data.load_counts(p)
    p.write_text("y,freq\n-2,1\n")
    with pytest.raises(ValueError, match="row 2: negative count"):
        data.load_counts(p)
    p.write_text("y,freq\n2,-1\n")
    with pytest.raises(ValueError, match="negative frequency"):
        data.load_counts(p)
    p.write_text("y,freq\n2,0\n")
    with pytest.raises(ValueError, match="no data rows"):
        data.load_counts(p)


# -- load_dataset -----------------------------------------------------------------

def test_vendored_datasets():
    mort = data.load_dataset("mortality")
    assert mort.n == 1096 and mort.y.min() >= 0
    thai = data.load_dataset("Thailand")
    assert thai.n == 602 and thai.y.min() >= 0


def test_norberg_not_vendored():
    with pytest.raises(FileNotFoundError, match="REBayes"):
        data.load_dataset("norberg")


def test_unknown_dataset():
    with pytest.raises(ValueError, match="unknown dataset"):
        data.load_dataset("galaxy")
