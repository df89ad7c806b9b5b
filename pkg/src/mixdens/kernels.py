"""Conditional likelihood families f(y|theta) shared by every estimator.

Four fixed families are supported: Gaussian with unit variance (theta is
the mean), Poisson (theta is the rate), Gamma with shape 10 (theta is the
rate), and Binomial with 10 trials (theta is the success probability).
Each family ties theta to a parameter support: the real line, the positive
reals, or the unit interval.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import expit, gammaln

from . import _fast

__all__ = [
    "Family",
    "Support",
    "KernelModel",
    "gaussian",
    "poisson",
    "gamma",
    "binomial",
    "kernel_by_name",
    "log_density",
    "log_density_matrix",
    "score",
    "sample",
    "to_support",
    "to_support_deriv",
    "from_support",
    "expfam_parts",
    "expfam_deriv_parts",
    "expfam_base",
    "support_bounds",
    "validate_observations",
]

GAUSS_SIGMA = 1.0
GAMMA_SHAPE = 10.0
BINOM_TRIALS = 10

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# floors keeping transformed parameters strictly inside open supports
_POS_FLOOR = 1e-12
_UNIT_CLIP = 1e-15


class Family(Enum):
    GAUSSIAN = "gaussian"
    POISSON = "poisson"
    GAMMA = "gamma"
    BINOMIAL = "binomial"


class Support(Enum):
    REAL_LINE = "real_line"
    POSITIVE_REAL = "positive_real"
    UNIT_INTERVAL = "unit_interval"


_FAMILY_SUPPORT = {
    Family.GAUSSIAN: Support.REAL_LINE,
    Family.POISSON: Support.POSITIVE_REAL,
    Family.GAMMA: Support.POSITIVE_REAL,
    Family.BINOMIAL: Support.UNIT_INTERVAL,
}


@dataclass(frozen=True)
class KernelModel:
    """A known conditional density family f(y|theta)."""

    family: Family

    @property
    def support(self) -> Support:
        return _FAMILY_SUPPORT[self.family]

    @property
    def discrete(self) -> bool:
        return self.family in (Family.POISSON, Family.BINOMIAL)

    @property
    def name(self) -> str:
        return self.family.value


def gaussian() -> KernelModel:
    return KernelModel(Family.GAUSSIAN)


def poisson() -> KernelModel:
    return KernelModel(Family.POISSON)


def gamma() -> KernelModel:
    return KernelModel(Family.GAMMA)


def binomial() -> KernelModel:
    return KernelModel(Family.BINOMIAL)


def kernel_by_name(name: str) -> KernelModel:
    try:
        return KernelModel(Family(name.lower()))
    except ValueError:
        raise ValueError(f"unknown kernel family {name!r}") from None


def support_bounds(k) -> tuple:
    """(lo, hi) bounds of the parameter support; None marks an open end."""
    s = k.support if isinstance(k, KernelModel) else k
    if s is Support.REAL_LINE:
        return None, None
    if s is Support.POSITIVE_REAL:
        return 0.0, None
    return 0.0, 1.0


def _check_theta(k: KernelModel, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta must be finite")
    s = k.support
    if s is Support.POSITIVE_REAL and np.any(theta < 0):
        raise ValueError("theta must be nonnegative for this family")
    if s is Support.UNIT_INTERVAL and (np.any(theta < 0) or np.any(theta > 1)):
        raise ValueError("theta must lie in [0, 1] for this family")
    return theta


def validate_observations(k: KernelModel, y) -> np.ndarray:
    """Validate and coerce observations for the family; returns a float vector."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.ndim != 1:
        raise ValueError("observations must be a 1-d vector")
    if y.size < 1:
        raise ValueError("need at least one observation")
    if not np.all(np.isfinite(y)):
        raise ValueError("observations must be finite")
    fam = k.family
    if fam in (Family.POISSON, Family.BINOMIAL):
        if np.any(y != np.round(y)) or np.any(y < 0):
            raise ValueError(f"{fam.value} observations must be nonnegative integers")
        if fam is Family.BINOMIAL and np.any(y > BINOM_TRIALS):
            raise ValueError(f"binomial observations cannot exceed {BINOM_TRIALS}")
    elif fam is Family.GAMMA and np.any(y <= 0):
        raise ValueError("gamma observations must be positive")
    return y


def log_density(k: KernelModel, y, theta):
    """log f(y|theta), broadcasting over y and theta.

    Boundary theta values take their limit: e.g. Poisson theta=0 gives 0
    at y=0 and -inf elsewhere.
    """
    theta = _check_theta(k, theta)
    y = np.asarray(y, dtype=float)
    _validate_y_values(k, y)
    fam = k.family
    with np.errstate(divide="ignore", invalid="ignore"):
        if fam is Family.GAUSSIAN:
            z = (y - theta) / GAUSS_SIGMA
            out = -0.5 * z * z - _LOG_SQRT_2PI - math.log(GAUSS_SIGMA)
        elif fam is Family.POISSON:
            out = np.where(
                theta > 0,
                y * np.log(np.where(theta > 0, theta, 1.0)) - theta - gammaln(y + 1),
                np.where(y == 0, 0.0, -np.inf),
            )
        elif fam is Family.GAMMA:
            a = GAMMA_SHAPE
            out = np.where(
                theta > 0,
                a * np.log(np.where(theta > 0, theta, 1.0))
                - gammaln(a)
                + (a - 1.0) * np.log(y)
                - theta * y,
                -np.inf,
            )
        else:
            m = BINOM_TRIALS
            lchoose = gammaln(m + 1) - gammaln(y + 1) - gammaln(m - y + 1)
            interior = np.clip(theta, 1e-300, 1.0 - 1e-16)
            core = y * np.log(interior) + (m - y) * np.log1p(-interior)
            out = lchoose + core
            out = np.where(theta == 0.0, np.where(y == 0, 0.0, -np.inf), out)
            out = np.where(theta == 1.0, np.where(y == m, 0.0, -np.inf), out)
    return out if out.ndim else float(out)


def _validate_y_values(k: KernelModel, y: np.ndarray):
    fam = k.family
    if fam in (Family.POISSON, Family.BINOMIAL):
        if np.any(y != np.round(y)) or np.any(y < 0):
            raise ValueError("invalid count observation")
        if fam is Family.BINOMIAL and np.any(y > BINOM_TRIALS):
            raise ValueError("binomial observation exceeds trial count")
    elif fam is Family.GAMMA and np.any(y <= 0):
        raise ValueError("gamma observations must be positive")


def log_density_matrix(k: KernelModel, y, theta_grid) -> np.ndarray:
    """(n, m) matrix of log f(y_i | theta_j) for interior theta values."""
    y = validate_observations(k, y)
    theta = _check_theta(k, np.atleast_1d(theta_grid))
    fam = k.family
    if fam is Family.GAUSSIAN:
        return _fast.ll_mat_gauss(y, theta)
    if fam is Family.POISSON:
        return _fast.ll_mat_poisson(y, theta)
    if fam is Family.GAMMA:
        return _fast.ll_mat_gamma(y, theta, GAMMA_SHAPE)
    return _fast.ll_mat_binom(y, theta, BINOM_TRIALS)


def score(k: KernelModel, y, theta):
    """d/dtheta log f(y|theta), broadcasting; theta strictly interior."""
    y = np.asarray(y, dtype=float)
    theta = np.asarray(theta, dtype=float)
    fam = k.family
    if fam is Family.GAUSSIAN:
        return (y - theta) / (GAUSS_SIGMA * GAUSS_SIGMA)
    if fam is Family.POISSON:
        return y / theta - 1.0
    if fam is Family.GAMMA:
        return GAMMA_SHAPE / theta - y
    return y / theta - (BINOM_TRIALS - y) / (1.0 - theta)


def sample(k: KernelModel, theta, rng: np.random.Generator):
    """Draw y ~ f(.|theta); vectorized over theta."""
    theta = _check_theta(k, theta)
    fam = k.family
    if fam is Family.GAUSSIAN:
        out = rng.normal(loc=theta, scale=GAUSS_SIGMA)
    elif fam is Family.POISSON:
        out = rng.poisson(lam=theta).astype(float)
    elif fam is Family.GAMMA:
        if np.any(theta <= 0):
            raise ValueError("gamma rate must be positive to sample")
        out = rng.gamma(shape=GAMMA_SHAPE, scale=1.0 / theta)
    else:
        out = rng.binomial(n=BINOM_TRIALS, p=theta).astype(float)
    return out if np.ndim(out) else float(out)


def to_support(k, x):
    """Map unconstrained reals onto the kernel's parameter support.

    Identity on the real line, softplus onto the positive reals, logistic
    onto the unit interval; smooth and strictly increasing in each case.
    Accepts a KernelModel or a Support.
    """
    s = k.support if isinstance(k, KernelModel) else k
    x = np.asarray(x, dtype=float)
    if s is Support.REAL_LINE:
        out = x + 0.0
    elif s is Support.POSITIVE_REAL:
        out = np.logaddexp(0.0, x) + _POS_FLOOR
    else:
        out = np.clip(expit(x), _UNIT_CLIP, 1.0 - _UNIT_CLIP)
    return out if out.ndim else float(out)


def to_support_deriv(k, x):
    """Derivative of :func:`to_support` w.r.t. its unconstrained input."""
    s = k.support if isinstance(k, KernelModel) else k
    x = np.asarray(x, dtype=float)
    if s is Support.REAL_LINE:
        out = np.ones_like(x)
    elif s is Support.POSITIVE_REAL:
        out = expit(x)
    else:
        p = expit(x)
        out = p * (1.0 - p)
    return out if out.ndim else float(out)


def expfam_parts(k: KernelModel, theta):
    """Natural-parameter split log f(y|theta) = y*eta + offset + base(y).

    All four families are one-parameter exponential families in y, which
    lets the hot loops share a single kernel. Returns (eta, offset) as
    arrays shaped like theta; theta must be strictly interior.
    """
    theta = np.asarray(theta, dtype=float)
    fam = k.family
    if fam is Family.GAUSSIAN:
        return theta, -0.5 * theta * theta
    if fam is Family.POISSON:
        return np.log(theta), -theta
    if fam is Family.GAMMA:
        a = GAMMA_SHAPE
        return -theta, a * np.log(theta) - gammaln(a)
    lt = np.log(theta)
    l1mt = np.log1p(-theta)
    return lt - l1mt, BINOM_TRIALS * l1mt


def expfam_deriv_parts(k: KernelModel, theta):
    """d(eta)/dtheta and d(offset)/dtheta for :func:`expfam_parts`."""
    theta = np.asarray(theta, dtype=float)
    fam = k.family
    if fam is Family.GAUSSIAN:
        return np.ones_like(theta), -theta
    if fam is Family.POISSON:
        return 1.0 / theta, -np.ones_like(theta)
    if fam is Family.GAMMA:
        return -np.ones_like(theta), GAMMA_SHAPE / theta
    return 1.0 / (theta * (1.0 - theta)), -BINOM_TRIALS / (1.0 - theta)


def expfam_base(k: KernelModel, y):
    """The theta-free term base(y) of :func:`expfam_parts`."""
    y = np.asarray(y, dtype=float)
    fam = k.family
    if fam is Family.GAUSSIAN:
        return -0.5 * y * y - _LOG_SQRT_2PI
    if fam is Family.POISSON:
        return -gammaln(y + 1.0)
    if fam is Family.GAMMA:
        return (GAMMA_SHAPE - 1.0) * np.log(y)
    m = BINOM_TRIALS
    return gammaln(m + 1.0) - gammaln(y + 1.0) - gammaln(m - y + 1.0)


def from_support(k, value):
    """Inverse of :func:`to_support` (used to seed output-layer biases)."""
    s = k.support if isinstance(k, KernelModel) else k
    v = np.asarray(value, dtype=float)
    if s is Support.REAL_LINE:
        out = v + 0.0
    elif s is Support.POSITIVE_REAL:
        v = np.maximum(v - _POS_FLOOR, 1e-12)
        # inverse softplus; for large v the correction term underflows to v
        out = np.where(v > 30.0, v, np.log(np.expm1(np.minimum(v, 30.0))))
    else:
        v = np.clip(v, _UNIT_CLIP, 1.0 - _UNIT_CLIP)
        out = np.log(v) - np.log1p(-v)
    return out if out.ndim else float(out)
