"""Simulation models with known mixing densities, and real count datasets.

Five synthetic models pair a conditional family with a closed-form mixing
prior; three classic count datasets feed the Poisson mixture application.
Datasets ship as frequency-form CSVs under mixdens/datasets.
"""

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy import stats

from . import kernels
from .kernels import KernelModel
from .metrics import DensityOnGrid
from .utils import substream

__all__ = [
    "SimModel",
    "CountDataset",
    "MODEL_NAMES",
    "DATASET_NAMES",
    "sim_model",
    "simulate",
    "true_prior_density",
    "true_prior_cdf",
    "prior_grid",
    "load_counts",
    "load_dataset",
]

MODEL_NAMES = ("gmm", "gamm", "pmm", "gmm-tri", "bbm")
DATASET_NAMES = ("norberg", "thailand", "mortality")


@dataclass(frozen=True)
class SimModel:
    """A conditional family plus the true mixing prior on its parameter."""

    name: str
    kernel: KernelModel
    # normal mixture components (weight, mean, sd), or a frozen scipy prior
    components: tuple = ()
    prior: object = None

    def prior_sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.prior is not None:
            return self.prior.rvs(size=n, random_state=rng)
        wts = np.array([c[0] for c in self.components])
        idx = rng.choice(len(self.components), size=n, p=wts)
        means = np.array([c[1] for c in self.components])[idx]
        sds = np.array([c[2] for c in self.components])[idx]
        return rng.normal(means, sds)

    def prior_pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.prior is not None:
            return self.prior.pdf(x)
        return sum(w * stats.norm.pdf(x, mu, sd) for w, mu, sd in self.components)

    def prior_cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.prior is not None:
            return self.prior.cdf(x)
        return sum(w * stats.norm.cdf(x, mu, sd) for w, mu, sd in self.components)

    def prior_range(self) -> tuple:
        """Covers all but ~1e-8 of the prior mass (for metric grids)."""
        if self.prior is not None:
            return tuple(self.prior.ppf([1e-8, 1.0 - 1e-8]))
        los = [mu - 6.0 * sd for _, mu, sd in self.components]
        his = [mu + 6.0 * sd for _, mu, sd in self.components]
        return min(los), max(his)


# variances in the mixture specs below are converted to sd via sqrt
_MODELS = {
    "gmm": SimModel(
        "gmm",
        kernels.gaussian(),
        components=((0.5, -3.0, np.sqrt(2.0)), (0.5, 3.0, 1.0)),
    ),
    "gmm-tri": SimModel(
        "gmm-tri",
        kernels.gaussian(),
        components=(
            (0.2, -4.0, np.sqrt(0.5)),
            (0.6, 0.0, 1.0),
            (0.2, 4.0, np.sqrt(0.5)),
        ),
    ),
    "gamm": SimModel("gamm", kernels.gamma(), prior=stats.beta(10.0, 5.0)),
    "pmm": SimModel("pmm", kernels.poisson(), prior=stats.gamma(3.0, scale=1.0)),
    "bbm": SimModel("bbm", kernels.binomial(), prior=stats.beta(3.0, 2.0)),
}


def sim_model(name: str) -> SimModel:
    try:
        return _MODELS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {MODEL_NAMES}") from None


def simulate(m: SimModel, n: int, seed: int):
    """Draw (y, theta): theta iid from the prior, y from the kernel."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = substream(seed, f"simulate:{m.name}")
    theta = m.prior_sample(n, rng)
    y = kernels.sample(m.kernel, theta, rng)
    return np.atleast_1d(y), np.atleast_1d(theta)


def prior_grid(m: SimModel, count: int = 2001) -> np.ndarray:
    lo, hi = m.prior_range()
    return np.linspace(lo, hi, count)


def true_prior_density(m: SimModel, grid) -> DensityOnGrid:
    grid = np.asarray(grid, dtype=float)
    return DensityOnGrid(grid, m.prior_pdf(grid))


def true_prior_cdf(m: SimModel, grid) -> np.ndarray:
    return m.prior_cdf(np.asarray(grid, dtype=float))


@dataclass(frozen=True)
class CountDataset:
    name: str
    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=int)
        if y.size < 1 or np.any(y < 0):
            raise ValueError("counts must be a nonempty nonnegative vector")
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return int(self.y.size)


def load_counts(path, name: str | None = None) -> CountDataset:
    """Read a count CSV: header plus a count column, optional frequency column.

    Frequency rows expand to raw counts in file order.
    """
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        ncol = len(header)
        if ncol not in (1, 2):
            raise ValueError(f"{path}: expected 1 or 2 columns, found {ncol}")
        for rownum, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                y = int(row[0])
                freq = int(row[1]) if ncol == 2 else 1
            except (ValueError, IndexError):
                raise ValueError(f"{path}: row {rownum}: cannot parse {row!r}") from None
            if y < 0:
                raise ValueError(f"{path}: row {rownum}: negative count {y}")
            if freq < 0:
                raise ValueError(f"{path}: row {rownum}: negative frequency {freq}")
            values.extend([y] * freq)
    if not values:
        raise ValueError(f"{path}: no data rows")
    return CountDataset(name=name or str(path), y=np.array(values, dtype=int))


def load_dataset(name: str) -> CountDataset:
    """Load one of the vendored datasets by name."""
    key = name.lower()
    if key not in DATASET_NAMES:
        raise ValueError(f"unknown dataset {name!r}; choose from {DATASET_NAMES}")
    root = resources.files("mixdens").joinpath("datasets")
    path = root.joinpath(f"{key}.csv")
    if not path.is_file():
        raise FileNotFoundError(
            f"dataset {key!r} is not vendored. The Norberg group life data "
            "(72 occupational groups) is distributed with the R package "
            "REBayes as data(Norberg); export its Death column to "
            f"{root}/norberg.csv as 'y,freq' rows to enable it."
        )
    with resources.as_file(path) as p:
        return load_counts(p, name=key)
