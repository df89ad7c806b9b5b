"""Mixing-density estimation for latent mixture models.

Estimators: discrete NPMLE on a fixed grid, its weighted-bootstrap
ensemble, a kernel-smoothed variant with cross-validated bandwidth, and a
generative-bootstrap estimator that trains a generator network once and
samples bootstrap draws from it.
"""

from .backend import backend_name
from .bootstrap import BootstrapEnsemble, WeightScheme, bootstrap_npmle, pooled_draws
from .data import MODEL_NAMES, CountDataset, SimModel, load_dataset, sim_model, simulate
from .gbnpmle import MixingProbabilities, TrainingTrace, fit_gb_npmle
from .kernels import KernelModel, binomial, gamma, gaussian, kernel_by_name, poisson
from .metrics import DensityOnGrid, ise, kde_density, lps_kfold, wasserstein1
from .nnet import GeneratorNetwork, TrainConfig
from .npmle import (
    DiscreteMixingDistribution,
    SupportGrid,
    default_grid,
    fit_weighted_npmle,
    marginal_log_likelihood,
    optimality_measure,
)
from .smooth import SmoothedDensity, kernel_smooth, loocv_bandwidth

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "KernelModel",
    "gaussian",
    "poisson",
    "gamma",
    "binomial",
    "kernel_by_name",
    "SupportGrid",
    "DiscreteMixingDistribution",
    "default_grid",
    "fit_weighted_npmle",
    "marginal_log_likelihood",
    "optimality_measure",
    "WeightScheme",
    "BootstrapEnsemble",
    "bootstrap_npmle",
    "pooled_draws",
    "SmoothedDensity",
    "kernel_smooth",
    "loocv_bandwidth",
    "GeneratorNetwork",
    "TrainConfig",
    "MixingProbabilities",
    "TrainingTrace",
    "fit_gb_npmle",
    "DensityOnGrid",
    "ise",
    "kde_density",
    "wasserstein1",
    "lps_kfold",
    "SimModel",
    "sim_model",
    "MODEL_NAMES",
    "simulate",
    "CountDataset",
    "load_dataset",
    "__version__",
]
