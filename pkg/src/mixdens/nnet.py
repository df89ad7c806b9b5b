"""Feedforward generator network with exact reverse-mode gradients.

The generator maps a bootstrap weight vector w (standardized) and a noise
draw z to l candidate parameters in the kernel support. The training loss
is the negative weighted log mixture likelihood averaged over the weight
draws, with the z/candidate average taken in likelihood space. Everything
is plain numpy; gradients are hand-derived and checked against central
differences in the tests.
"""

import io
from dataclasses import dataclass, field

import numpy as np

from . import _fast, kernels
from .kernels import KernelModel

__all__ = [
    "TrainConfig",
    "GeneratorNetwork",
    "AdamState",
    "init_network",
    "forward",
    "forward_paired",
    "loss_and_grad",
    "adam_step",
]

CHECKPOINT_VERSION = 1


@dataclass
class TrainConfig:
    """Training constants; defaults follow the two-stage procedure."""

    l: int = 100
    tol: float = 1e-3
    T: int = 2000
    B: int = 1000
    S_w: int = 100
    S_z: int = 100
    S_gamma: int = 100
    q: int = 1
    L: int = 2
    h: int = 500
    lr: float = 1e-4
    seed: int = 0
    mcem_S: int = 100  # shared (w, z) pairs per MCEM iteration
    mcem_max_iter: int = 200

    def __post_init__(self):
        counts = (self.l, self.T + 1, self.B, self.S_w, self.S_z, self.S_gamma,
                  self.q, self.L, self.h, self.mcem_S, self.mcem_max_iter)
        if any(c < 1 for c in counts):
            raise ValueError("all sizes must be positive (T may be 0)")
        if self.tol <= 0 or self.lr <= 0:
            raise ValueError("tol and lr must be positive")


@dataclass
class GeneratorNetwork:
    """Stacked tanh layers; final affine output mapped into the support."""

    n: int
    q: int
    l: int
    kernel: KernelModel
    weights: list  # per layer, shapes (n+q,h), (h,h)*, (h,l)
    biases: list
    w_sd: float  # weight-input standardization scale, recorded for reload

    @property
    def hidden_layers(self) -> int:
        return len(self.weights) - 1

    def standardize_w(self, w: np.ndarray) -> np.ndarray:
        return (w - 1.0) / self.w_sd

    def to_npz(self, path):
        arrays = {f"W{i}": W for i, W in enumerate(self.weights)}
        arrays.update({f"b{i}": b for i, b in enumerate(self.biases)})
        np.savez(
            path,
            version=np.int64(CHECKPOINT_VERSION),
            n=np.int64(self.n),
            q=np.int64(self.q),
            l=np.int64(self.l),
            depth=np.int64(len(self.weights)),
            kernel=np.bytes_(self.kernel.name.encode()),
            w_sd=np.float64(self.w_sd),
            **arrays,
        )

    @classmethod
    def from_npz(cls, path) -> "GeneratorNetwork":
        with np.load(path) as z:
            if int(z["version"]) != CHECKPOINT_VERSION:
                raise ValueError(f"unsupported checkpoint version {int(z['version'])}")
            depth = int(z["depth"])
            return cls(
                n=int(z["n"]),
                q=int(z["q"]),
                l=int(z["l"]),
                kernel=kernels.kernel_by_name(bytes(z["kernel"]).decode()),
                weights=[z[f"W{i}"] for i in range(depth)],
                biases=[z[f"b{i}"] for i in range(depth)],
                w_sd=float(z["w_sd"]),
            )

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        self.to_npz(buf)
        return buf.getvalue()


def init_network(
    n: int, k: KernelModel, cfg: TrainConfig, rng: np.random.Generator,
    theta_spread: np.ndarray | None = None,
) -> GeneratorNetwork:
    """Fan-in-scaled uniform init.

    The output biases are seeded so the candidates start spread across
    theta_spread (in support coordinates) instead of collapsed at one
    point.
    """
    dims = [n + cfg.q] + [cfg.h] * cfg.L + [cfg.l]
    weights, biases = [], []
    for d_in, d_out in zip(dims[:-1], dims[1:]):
        s = 1.0 / np.sqrt(d_in)
        weights.append(rng.uniform(-s, s, size=(d_in, d_out)))
        biases.append(np.zeros(d_out))
    if theta_spread is not None:
        spread = np.asarray(theta_spread, dtype=float)
        if spread.size != cfg.l:
            spread = np.quantile(spread, np.linspace(0.01, 0.99, cfg.l))
        biases[-1][:] = kernels.from_support(k, spread)
    # Dirichlet-times-n weights have sd sqrt((n-1)/(n+1)) around mean 1
    w_sd = np.sqrt((n - 1.0) / (n + 1.0)) if n > 1 else 1.0
    return GeneratorNetwork(
        n=n, q=cfg.q, l=cfg.l, kernel=k, weights=weights, biases=biases, w_sd=w_sd
    )


def _forward_cached(g: GeneratorNetwork, Wraw: np.ndarray, Z: np.ndarray):
    """Batched forward over all (weight draw, noise draw) pairs.

    The first layer is evaluated separately on the two input blocks and
    broadcast-added, avoiding the S_w*S_z full input products. Returns the
    raw (pre-transform) outputs plus the activation caches for backprop.
    """
    Wstd = np.atleast_2d(g.standardize_w(Wraw))
    Z = np.atleast_2d(Z)
    S_w, S_z = Wstd.shape[0], Z.shape[0]
    W1, b1 = g.weights[0], g.biases[0]
    pre_w = Wstd @ W1[: g.n]
    pre_z = Z @ W1[g.n :]
    A = np.tanh(pre_w[:, None, :] + pre_z[None, :, :] + b1).reshape(S_w * S_z, -1)
    acts = [A]
    for W, b in zip(g.weights[1:-1], g.biases[1:-1]):
        A = np.tanh(A @ W + b)
        acts.append(A)
    raw = A @ g.weights[-1] + g.biases[-1]
    return raw, acts, Wstd, Z, (S_w, S_z)


def forward(g: GeneratorNetwork, w: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Candidate vector theta in the kernel support for one (w, z) pair."""
    raw, *_ = _forward_cached(g, np.asarray(w, dtype=float), np.asarray(z, dtype=float))
    return kernels.to_support(g.kernel, raw[0])


def forward_paired(g: GeneratorNetwork, Wraw: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Raw outputs for row-aligned (w, z) pairs: one draw per row."""
    Wstd = np.atleast_2d(g.standardize_w(np.asarray(Wraw, dtype=float)))
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    if Wstd.shape[0] != Z.shape[0]:
        raise ValueError("paired forward needs equal numbers of w and z rows")
    W1, b1 = g.weights[0], g.biases[0]
    A = np.tanh(Wstd @ W1[: g.n] + Z @ W1[g.n :] + b1)
    for W, b in zip(g.weights[1:-1], g.biases[1:-1]):
        A = np.tanh(A @ W + b)
    return A @ g.weights[-1] + g.biases[-1]


def _backprop(g, dRaw, acts, Wstd, Z, shape):
    """Gradients of a scalar loss w.r.t. all parameters given dLoss/dRaw."""
    S_w, S_z = shape
    gW = [None] * len(g.weights)
    gB = [None] * len(g.biases)
    delta = dRaw
    for li in range(len(g.weights) - 1, 0, -1):
        A = acts[li - 1]
        gW[li] = A.T @ delta
        gB[li] = delta.sum(axis=0)
        delta = (delta @ g.weights[li].T) * (1.0 - A * A)
    d1 = delta.reshape(S_w, S_z, -1)
    gW0 = np.empty_like(g.weights[0])
    gW0[: g.n] = Wstd.T @ d1.sum(axis=1)
    gW0[g.n :] = Z.T @ d1.sum(axis=0)
    gW[0] = gW0
    gB[0] = delta.sum(axis=0)
    return gW, gB


def loss_and_grad(
    g: GeneratorNetwork,
    Wraw: np.ndarray,
    Z: np.ndarray,
    gamma: np.ndarray,
    y: np.ndarray,
    k: KernelModel,
):
    """Monte Carlo mixture loss and its exact parameter gradients.

    loss = -(1/S_w) sum_s sum_i w_i^(s) log[(1/C) sum_{z,gamma} f(y_i|theta)]
    with theta the gamma-indexed generator outputs and C = S_z*len(gamma).
    Returns (loss, weight grads, bias grads).
    """
    Wraw = np.atleast_2d(np.asarray(Wraw, dtype=float))
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    gamma = np.asarray(gamma, dtype=np.intp)
    if Wraw.size == 0 or Z.size == 0 or gamma.size == 0:
        raise ValueError("batch must be nonempty")
    raw, acts, Wstd, Zc, (S_w, S_z) = _forward_cached(g, Wraw, Z)
    plain = gamma.size == g.l and np.array_equal(gamma, np.arange(g.l))
    sel = raw.reshape(S_w, S_z, g.l)
    if not plain:
        sel = sel[:, :, gamma]
    theta = kernels.to_support(k, sel)
    dtheta = kernels.to_support_deriv(k, sel)

    yu, inv = np.unique(y, return_inverse=True)
    base = np.ascontiguousarray(kernels.expfam_base(k, yu))
    C = S_z * gamma.size
    eta, off = kernels.expfam_parts(k, theta.reshape(S_w, C))
    deta, doff = kernels.expfam_deriv_parts(k, theta.reshape(S_w, C))

    total = 0.0
    dSel = np.empty((S_w, C))
    T0 = np.empty(C)
    T1 = np.empty(C)
    for s in range(S_w):
        # yu is sorted, so per-draw weights always aggregate through inv
        wv = np.bincount(inv, weights=Wraw[s], minlength=yu.size)
        T0[:] = 0.0
        T1[:] = 0.0
        obj = _fast.mix_objective(
            yu, np.ascontiguousarray(wv), np.ascontiguousarray(eta[s]),
            np.ascontiguousarray(off[s]), base, T0, T1,
        )
        if not np.isfinite(obj):
            raise FloatingPointError(f"non-finite loss term at weight draw {s}")
        total += obj
        dSel[s] = deta[s] * T1 + doff[s] * T0
    loss = -total / S_w
    dSel *= -1.0 / S_w
    dSel3 = dSel.reshape(S_w, S_z, gamma.size) * dtheta
    dRaw3 = np.zeros((S_w, S_z, g.l))
    if plain:
        dRaw3[:] = dSel3
    else:
        np.add.at(dRaw3, (slice(None), slice(None), gamma), dSel3)
    gW, gB = _backprop(g, dRaw3.reshape(S_w * S_z, g.l), acts, Wstd, Zc, (S_w, S_z))
    return loss, gW, gB


@dataclass
class AdamState:
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    @classmethod
    def for_network(cls, g: GeneratorNetwork, lr: float) -> "AdamState":
        params = g.weights + g.biases
        return cls(
            lr=lr,
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
        )


def adam_step(g: GeneratorNetwork, state: AdamState, gW: list, gB: list):
    """Bias-corrected Adam update of all parameters, in place."""
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**state.t
    c2 = 1.0 - b2**state.t
    params = g.weights + g.biases
    grads = gW + gB
    for p, grad, m, v in zip(params, grads, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * grad
        v *= b2
        v += (1.0 - b2) * grad * grad
        p -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
