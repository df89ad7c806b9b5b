"""Bootstrap weight sampling and the brute-force bootstrapped NPMLE.

Every replicate re-solves the weighted NPMLE under fresh random weights;
the replicate ensemble approximates the sampling distribution of the
mixing density. Weights are pre-drawn on a single stream so results do
not depend on execution order, and all replicates are advanced together
through one BLAS-batched EM (see _fast.em_batch).
"""

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _fast, kernels, npmle
from .kernels import KernelModel
from .npmle import PRUNE_EPS, DiscreteMixingDistribution, SupportGrid

__all__ = [
    "WeightScheme",
    "BootstrapEnsemble",
    "sample_weights",
    "bootstrap_npmle",
    "pooled_draws",
]


class WeightScheme(Enum):
    DIRICHLET_TIMES_N = "dirichlet"
    MULTINOMIAL = "multinomial"


@dataclass
class BootstrapEnsemble:
    """B bootstrap replicates: fitted distributions or raw theta draws."""

    scheme: str
    seed: int | None = None
    distributions: list | None = None
    draws: np.ndarray | None = None

    def __post_init__(self):
        if (self.distributions is None) == (self.draws is None):
            raise ValueError("exactly one of distributions/draws must be set")
        if self.size < 1:
            raise ValueError("ensemble must have at least one replicate")

    @property
    def size(self) -> int:
        if self.distributions is not None:
            return len(self.distributions)
        return int(self.draws.shape[0])

    def pooled(self) -> DiscreteMixingDistribution:
        """Ensemble-average mixing distribution (atoms merged, weights/B)."""
        if self.distributions is None:
            raise ValueError("pooled needs a distribution ensemble")
        atoms = np.concatenate([d.atoms for d in self.distributions])
        wts = np.concatenate([d.weights for d in self.distributions]) / self.size
        uniq, inv = np.unique(atoms, return_inverse=True)
        merged = np.bincount(inv, weights=wts)
        return DiscreteMixingDistribution(uniq, merged / merged.sum())

    def to_jsonl(self) -> str:
        if self.distributions is not None:
            return "\n".join(d.to_json() for d in self.distributions) + "\n"
        return "\n".join(json.dumps(float(t)) for t in self.draws) + "\n"

    @classmethod
    def from_jsonl(cls, text: str, scheme: str = "dirichlet", seed=None):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        first = json.loads(lines[0])
        if isinstance(first, dict):
            dists = [DiscreteMixingDistribution.from_json(ln) for ln in lines]
            return cls(scheme=scheme, seed=seed, distributions=dists)
        return cls(scheme=scheme, seed=seed, draws=np.array([json.loads(ln) for ln in lines]))


def sample_weights(scheme: WeightScheme, n: int, rng: np.random.Generator) -> np.ndarray:
    """One bootstrap weight vector of length n (sums to n)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if scheme is WeightScheme.DIRICHLET_TIMES_N:
        g = rng.exponential(size=n)
        return n * g / g.sum()
    counts = rng.multinomial(n, np.full(n, 1.0 / n))
    return counts.astype(float)


def bootstrap_npmle(
    y,
    k: KernelModel,
    grid: SupportGrid,
    scheme: WeightScheme = WeightScheme.DIRICHLET_TIMES_N,
    B: int = 1000,
    rng: np.random.Generator | None = None,
    tol: float = 1e-8,
    max_iter: int = 5000,
    compute_certificates: bool = True,
) -> BootstrapEnsemble:
    """B independent weighted NPMLE fits under resampled weights."""
    if B < 1:
        raise ValueError("B must be at least 1")
    if rng is None:
        rng = np.random.default_rng()
    y = kernels.validate_observations(k, y)
    n = y.size
    Wmat = np.empty((n, B))
    for b in range(B):
        Wmat[:, b] = sample_weights(scheme, n, rng)

    # duplicates collapse exactly; replicate weights aggregate the same way
    yu, inv = np.unique(y, return_inverse=True)
    if yu.size < n:
        Wu = np.zeros((yu.size, B))
        np.add.at(Wu, inv, Wmat)
    else:
        Wu = Wmat
    A, _ = npmle._scaled_likelihood(yu, k, grid.points)
    Pi, _, ok = _fast.em_batch(A, Wu, tol, max_iter)
    if not ok.all():
        bad = int(np.flatnonzero(~ok)[0])
        raise RuntimeError(f"replicate {bad}: EM denominator underflowed on the grid")

    dists = []
    for b in range(B):
        pi = Pi[:, b]
        keep = pi >= PRUNE_EPS
        if not np.any(keep):
            keep = pi == pi.max()
        d = DiscreteMixingDistribution(grid.points[keep], pi[keep] / pi[keep].sum())
        w_b = np.ascontiguousarray(Wmat[:, b])
        d.loglik = npmle.marginal_log_likelihood(y, w_b, k, d)
        if compute_certificates:
            d.optimality = npmle.optimality_measure(y, w_b, k, d, grid)
        dists.append(d)
    return BootstrapEnsemble(scheme=scheme.value, distributions=dists)


def pooled_draws(
    e: BootstrapEnsemble, per_replicate: int, rng: np.random.Generator
) -> np.ndarray:
    """per_replicate atom draws from each replicate, concatenated in order."""
    if per_replicate < 1:
        raise ValueError("per_replicate must be at least 1")
    if e.distributions is None:
        raise ValueError("pooled_draws needs a distribution ensemble")
    return np.concatenate([d.sample(per_replicate, rng) for d in e.distributions])
