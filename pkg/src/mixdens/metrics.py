"""Evaluation metrics: Wasserstein-1, integrated squared error, and the
K-fold log predictive score, plus the KDE used to turn draw ensembles into
densities."""

import numpy as np
from scipy.special import logsumexp

from . import _fast, kernels
from .kernels import KernelModel
from .npmle import DiscreteMixingDistribution
from .utils import trapezoid

__all__ = [
    "DensityOnGrid",
    "ecdf",
    "as_cdf",
    "wasserstein1",
    "ise",
    "silverman_bandwidth",
    "kde_density",
    "lps_kfold",
]


class DensityOnGrid:
    """Density values tabulated on an increasing grid."""

    def __init__(self, grid, values, normalized: bool = False):
        self.grid = np.asarray(grid, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.grid.ndim != 1 or self.grid.shape != self.values.shape:
            raise ValueError("grid and values must be 1-d and same length")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(self.values < 0):
            raise ValueError("density values must be nonnegative")
        self.normalized = normalized
        if normalized and abs(trapezoid(self.values, self.grid) - 1.0) > 1e-3:
            raise ValueError("normalized density must integrate to 1 within 1e-3")

    def normalize(self) -> "DensityOnGrid":
        z = trapezoid(self.values, self.grid)
        if z <= 0:
            raise ValueError("cannot normalize a zero density")
        return DensityOnGrid(self.grid, self.values / z, normalized=True)

    def mean(self) -> float:
        return trapezoid(self.grid * self.values, self.grid)


def ecdf(samples) -> callable:
    """Empirical CDF of a sample, as a vectorized callable."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size

    def F(x):
        return np.searchsorted(xs, np.asarray(x, dtype=float), side="right") / n

    return F


def as_cdf(obj):
    """(callable CDF, low hint, high hint) from a CDF, distribution or sample."""
    if isinstance(obj, DiscreteMixingDistribution):
        lo, hi = float(obj.atoms.min()), float(obj.atoms.max())
        sd = float(np.sqrt(max(obj.weights @ obj.atoms**2 - obj.mean() ** 2, 0.0)))
        return obj.cdf, lo - 4 * sd, hi + 4 * sd
    if isinstance(obj, np.ndarray) or (
        isinstance(obj, (list, tuple)) and obj and np.isscalar(obj[0])
    ):
        xs = np.asarray(obj, dtype=float)
        sd = float(xs.std())
        return ecdf(xs), float(xs.min()) - 4 * sd, float(xs.max()) + 4 * sd
    if callable(obj):
        return obj, None, None
    raise TypeError(f"cannot interpret {type(obj).__name__} as a CDF")


def wasserstein1(F, G, lo: float | None = None, hi: float | None = None,
                 resolution: int = 10_000) -> float:
    """Trapezoid integral of |F - G| over [lo, hi].

    F and G may be CDF callables, discrete mixing distributions, or sample
    vectors (empirical CDF). When lo/hi are omitted both inputs must carry
    a support hint (samples or atoms); the range is their union extended
    by four standard deviations.
    """
    Fc, flo, fhi = as_cdf(F)
    Gc, glo, ghi = as_cdf(G)
    if lo is None:
        hints = [v for v in (flo, glo) if v is not None]
        if not hints:
            raise ValueError("lo required when neither input has a support hint")
        lo = min(hints)
    if hi is None:
        hints = [v for v in (fhi, ghi) if v is not None]
        if not hints:
            raise ValueError("hi required when neither input has a support hint")
        hi = max(hints)
    xs = np.linspace(lo, hi, resolution)
    return trapezoid(np.abs(np.asarray(Fc(xs), dtype=float) - np.asarray(Gc(xs), dtype=float)), xs)


def ise(p: DensityOnGrid, q: DensityOnGrid) -> float:
    """Integrated squared difference; q is interpolated onto p's grid if needed."""
    if p.grid.shape == q.grid.shape and np.array_equal(p.grid, q.grid):
        qv = q.values
    else:
        qv = np.interp(p.grid, q.grid, q.values, left=0.0, right=0.0)
    d = p.values - qv
    return trapezoid(d * d, p.grid)


def silverman_bandwidth(samples: np.ndarray) -> float:
    """Rule-of-thumb Gaussian KDE bandwidth 0.9 min(sd, IQR/1.34) n^(-1/5)."""
    xs = np.asarray(samples, dtype=float)
    sd = xs.std()
    q75, q25 = np.percentile(xs, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34)
    if spread <= 0:
        spread = max(sd, 1e-3)
    return 0.9 * spread * xs.size ** (-0.2)


def kde_density(
    samples,
    grid,
    bandwidth: float | None = None,
    bounds: tuple = (None, None),
    weights=None,
) -> DensityOnGrid:
    """Gaussian KDE on a grid, reflecting mass at any finite bound."""
    xs = np.ascontiguousarray(np.asarray(samples, dtype=float))
    if xs.size < 2:
        raise ValueError("need at least 2 samples")
    grid = np.ascontiguousarray(np.asarray(grid, dtype=float))
    if weights is None:
        wts = np.full(xs.size, 1.0 / xs.size)
    else:
        wts = np.asarray(weights, dtype=float)
        wts = wts / wts.sum()
    h = silverman_bandwidth(xs) if bandwidth is None else float(bandwidth)
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    pts, pw = [xs], [wts]
    lo, hi = bounds
    if lo is not None:
        pts.append(2.0 * lo - xs)
        pw.append(wts)
    if hi is not None:
        pts.append(2.0 * hi - xs)
        pw.append(wts)
    vals = _fast.kde_gauss(
        grid, np.ascontiguousarray(np.concatenate(pts)),
        np.ascontiguousarray(np.concatenate(pw)), h,
    )
    return DensityOnGrid(grid, vals).normalize()


def lps_kfold(
    y,
    k: KernelModel,
    fitter,
    K: int = 10,
    B: int = 500,
    rng: np.random.Generator | None = None,
) -> float:
    """K-fold log predictive score of an ensemble estimator.

    fitter(y_train, B, rng) must return a vector of B parameter draws; the
    score for a held-out point is -log of the draw-averaged likelihood,
    summed over the fold and averaged over folds.
    """
    y = kernels.validate_observations(k, y)
    n = y.size
    if n < K:
        raise ValueError("need at least K observations")
    if rng is None:
        rng = np.random.default_rng()
    perm = rng.permutation(n)
    folds = np.array_split(perm, K)
    total = 0.0
    for fold_id, idx in enumerate(folds):
        train = np.delete(y, idx)
        try:
            draws = np.asarray(fitter(train, B, rng), dtype=float)
        except Exception as exc:
            raise RuntimeError(f"fold {fold_id}: estimator failed: {exc}") from exc
        ll = kernels.log_density_matrix(k, y[idx], draws)
        with np.errstate(divide="ignore"):
            log_mean = logsumexp(ll, axis=1) - np.log(draws.size)
        total += float(-log_mean.sum())
    return total / K
