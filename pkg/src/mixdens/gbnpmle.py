"""Two-stage generative bootstrap estimator of the mixing density.

Stage I trains the generator on the mixture objective with the candidate
index averaged uniformly; Stage II estimates the mixing probabilities tau
over the generator's output coordinates by Monte Carlo EM. Bootstrap
draws then cost one forward pass each, however many are requested.
"""

import csv as _csv
import io
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import _fast, kernels, nnet
from .kernels import KernelModel
from .nnet import AdamState, GeneratorNetwork, TrainConfig

__all__ = [
    "MixingProbabilities",
    "TrainingTrace",
    "Stage1Diverged",
    "stage1_train",
    "stage2_mcem",
    "generate",
    "fit_gb_npmle",
]

_GEN_CHUNK = 1024


class Stage1Diverged(RuntimeError):
    def __init__(self, msg, trace):
        super().__init__(msg)
        self.trace = trace


@dataclass
class MixingProbabilities:
    tau: np.ndarray

    def __post_init__(self):
        self.tau = np.asarray(self.tau, dtype=float)
        if np.any(self.tau < 0) or abs(self.tau.sum() - 1.0) > 1e-10:
            raise ValueError("tau must be a probability vector")


@dataclass
class TrainingTrace:
    """Per-epoch Stage-I losses and per-iteration Stage-II diagnostics."""

    stage1_loss: np.ndarray = field(default_factory=lambda: np.empty(0))
    stage2_loglik: np.ndarray = field(default_factory=lambda: np.empty(0))
    stage2_se: np.ndarray = field(default_factory=lambda: np.empty(0))
    stage2_min_dtau: np.ndarray = field(default_factory=lambda: np.empty(0))
    stage2_max_dtau: np.ndarray = field(default_factory=lambda: np.empty(0))
    seconds: dict = field(default_factory=dict)

    def stage1_csv(self) -> str:
        buf = io.StringIO()
        w = _csv.writer(buf)
        w.writerow(["epoch", "loss"])
        for t, v in enumerate(self.stage1_loss):
            w.writerow([t, repr(float(v))])
        return buf.getvalue()

    def stage2_csv(self) -> str:
        buf = io.StringIO()
        w = _csv.writer(buf)
        w.writerow(["iter", "loglik", "se", "min_dtau", "max_dtau"])
        rows = zip(self.stage2_loglik, self.stage2_se,
                   self.stage2_min_dtau, self.stage2_max_dtau)
        for t, (ll, se, lo, hi) in enumerate(rows, start=1):
            w.writerow([t, repr(float(ll)), repr(float(se)),
                        repr(float(lo)), repr(float(hi))])
        return buf.getvalue()


def _stratified_gamma(l: int, s_gamma: int) -> np.ndarray:
    """Every candidate index represented equally in each batch."""
    reps = -(-s_gamma // l)
    return np.tile(np.arange(l), reps)[:s_gamma]


def _dirichlet_weights(n: int, rows: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.exponential(size=(rows, n))
    return n * g / g.sum(axis=1, keepdims=True)


def _theta_spread(y: np.ndarray, k: KernelModel, l: int) -> np.ndarray:
    """Initial candidate locations: the family's moment inversion of y,
    taken at l equally spaced quantiles so every coordinate starts where
    data are plausible."""
    fam = k.family
    if fam is kernels.Family.GAUSSIAN:
        vals = y
    elif fam is kernels.Family.POISSON:
        vals = np.maximum(y, 1e-3)
    elif fam is kernels.Family.GAMMA:
        vals = kernels.GAMMA_SHAPE / y
    else:
        vals = np.clip((y + 0.5) / (kernels.BINOM_TRIALS + 1.0), 1e-3, 1.0 - 1e-3)
    qs = np.quantile(vals, np.linspace(0.01, 0.99, l))
    return np.sort(qs)


def stage1_train(y, k: KernelModel, cfg: TrainConfig, rng: np.random.Generator):
    """Train the generator on the uniform-index mixture objective.

    One Adam step per epoch on a fresh batch of S_w weight draws, S_z
    noise draws, and a stratified candidate-index set; the mixing
    probabilities stay uniform throughout.
    """
    y = kernels.validate_observations(k, y)
    n = y.size
    g = nnet.init_network(n, k, cfg, rng, theta_spread=_theta_spread(y, k, cfg.l))
    state = AdamState.for_network(g, cfg.lr)
    gamma = _stratified_gamma(cfg.l, cfg.S_gamma)
    losses = np.empty(cfg.T)
    bad_streak = 0
    t0 = time.perf_counter()
    for t in range(cfg.T):
        Wraw = _dirichlet_weights(n, cfg.S_w, rng)
        Z = rng.random((cfg.S_z, cfg.q))
        try:
            loss, gW, gB = nnet.loss_and_grad(g, Wraw, Z, gamma, y, k)
        except FloatingPointError:
            losses[t] = np.nan
            bad_streak += 1
            if bad_streak >= 10:
                trace = TrainingTrace(stage1_loss=losses[: t + 1])
                raise Stage1Diverged(
                    f"non-finite loss for {bad_streak} consecutive epochs", trace
                ) from None
            continue
        bad_streak = 0
        losses[t] = loss
        nnet.adam_step(g, state, gW, gB)
    trace = TrainingTrace(stage1_loss=losses)
    trace.seconds["stage1"] = time.perf_counter() - t0
    return g, trace


def _log_mean_f(yu, k, g, Wraw, Z):
    """(U, l) log of the draw-averaged f(y_u|theta_k) over paired draws."""
    raw = nnet.forward_paired(g, Wraw, Z)
    theta = kernels.to_support(k, raw)
    eta, off = kernels.expfam_parts(k, theta)
    return _fast.logf_mean_draws(
        np.ascontiguousarray(yu),
        np.ascontiguousarray(eta.T),
        np.ascontiguousarray(off.T),
    )


def stage2_mcem(y, k: KernelModel, g: GeneratorNetwork, cfg: TrainConfig,
                rng: np.random.Generator):
    """Closed-form MCEM for the mixing probabilities over the l candidates.

    Each iteration draws one shared batch of (w, z) pairs, estimates the
    per-candidate likelihood of every observation, and updates tau as the
    mean responsibility. Stops once the smallest per-coordinate change
    falls below cfg.tol (the largest change is logged as well).
    """
    y = kernels.validate_observations(k, y)
    n = y.size
    yu, inv = np.unique(y, return_inverse=True)
    cnt = np.bincount(inv).astype(float)
    base_total = float(cnt @ kernels.expfam_base(k, yu))
    tau = np.full(g.l, 1.0 / g.l)
    logliks, ses, dmin, dmax = [], [], [], []
    groups = 5 if cfg.mcem_S >= 5 else 1
    t0 = time.perf_counter()
    for _ in range(cfg.mcem_max_iter):
        Wraw = _dirichlet_weights(n, cfg.mcem_S, rng)
        Z = rng.random((cfg.mcem_S, cfg.q))
        logE = _log_mean_f(yu, k, g, Wraw, Z)
        with np.errstate(divide="ignore"):
            scores = logE + np.log(tau)
        denom = logsumexp(scores, axis=1)
        if not np.all(np.isfinite(denom)):
            bad = int(np.argmin(np.isfinite(denom)))
            raise RuntimeError(
                f"all candidates implausible for observation value {yu[bad]}"
            )
        R = np.exp(scores - denom[:, None])
        tau_new = cnt @ R / n
        tau_new /= tau_new.sum()
        # diagnostics on the same shared batch, at the updated tau
        with np.errstate(divide="ignore"):
            ll = float(cnt @ logsumexp(logE + np.log(tau_new), axis=1)) + base_total
        sub = []
        for j in range(groups):
            sl = slice(j, None, groups)
            logE_j = _log_mean_f(yu, k, g, Wraw[sl], Z[sl])
            with np.errstate(divide="ignore"):
                sub.append(float(cnt @ logsumexp(logE_j + np.log(tau_new), axis=1)))
        se = float(np.std(sub, ddof=1) / np.sqrt(groups)) if groups > 1 else 0.0
        delta = np.abs(tau_new - tau)
        logliks.append(ll)
        ses.append(se)
        dmin.append(float(delta.min()))
        dmax.append(float(delta.max()))
        tau = tau_new
        if delta.min() < cfg.tol:
            break
    trace = TrainingTrace(
        stage2_loglik=np.array(logliks),
        stage2_se=np.array(ses),
        stage2_min_dtau=np.array(dmin),
        stage2_max_dtau=np.array(dmax),
    )
    trace.seconds["stage2"] = time.perf_counter() - t0
    return MixingProbabilities(tau), trace


def generate(g: GeneratorNetwork, tau: MixingProbabilities, B: int,
             rng: np.random.Generator) -> np.ndarray:
    """B independent draws: fresh (w, z) pair, candidate index from tau."""
    if B < 1:
        raise ValueError("B must be at least 1")
    t = tau.tau if isinstance(tau, MixingProbabilities) else np.asarray(tau, dtype=float)
    out = np.empty(B)
    for lo in range(0, B, _GEN_CHUNK):
        m = min(_GEN_CHUNK, B - lo)
        Wraw = _dirichlet_weights(g.n, m, rng)
        Z = rng.random((m, g.q))
        idx = rng.choice(g.l, size=m, p=t)
        raw = nnet.forward_paired(g, Wraw, Z)
        out[lo : lo + m] = kernels.to_support(g.kernel, raw[np.arange(m), idx])
    return out


def fit_gb_npmle(y, k: KernelModel, cfg: TrainConfig, rng: np.random.Generator):
    """Stage I, Stage II, then B generated draws."""
    g, trace1 = stage1_train(y, k, cfg, rng)
    tau, trace2 = stage2_mcem(y, k, g, cfg, rng)
    t0 = time.perf_counter()
    draws = generate(g, tau, cfg.B, rng)
    trace = TrainingTrace(
        stage1_loss=trace1.stage1_loss,
        stage2_loglik=trace2.stage2_loglik,
        stage2_se=trace2.stage2_se,
        stage2_min_dtau=trace2.stage2_min_dtau,
        stage2_max_dtau=trace2.stage2_max_dtau,
        seconds={**trace1.seconds, **trace2.seconds, "generate": time.perf_counter() - t0},
    )
    return draws, g, tau, trace
