"""Overfitting a Siamese SIREN to one clip: MSE loss, analytic gradients, Adam."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .audio_io import AudioClip
from .encoding import encode_grid
from .model import NetConfig, SiameseParams, forward, forward_cached, init

log = logging.getLogger(__name__)

# Rows per gradient chunk; bounds activation memory on long clips.
CHUNK = 65536


class TrainingDiverged(FloatingPointError):
    def __init__(self, iteration: int, value: float):
        super().__init__(f"non-finite loss {value} at iteration {iteration}")
        self.iteration = iteration


@dataclass(frozen=True)
class TrainConfig:
    iterations: int = 2500
    learning_rate: float = 1e-4
    weight_decay: float = 1e-5
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    batch: Optional[int] = None  # None means the full clip every iteration
    seed: int = 0
    dtype: type = np.float32

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if self.learning_rate < 0 or self.weight_decay < 0:
            raise ValueError("learning_rate and weight_decay must be non-negative")
        if self.batch is not None and self.batch < 1:
            raise ValueError("batch must be positive")


@dataclass
class TrainReport:
    losses: np.ndarray
    duration: float
    final_head_losses: tuple[float, ...]
    extra: dict = field(default_factory=dict)

    @property
    def final_loss(self) -> float:
        return float(np.mean(self.final_head_losses))


def _check_batch(coords, targets):
    if len(coords) != len(targets):
        raise ValueError(f"{len(coords)} coordinates but {len(targets)} targets")
    if len(targets) == 0:
        raise ValueError("empty batch")


def head_losses(params: SiameseParams, cfg: NetConfig, coords, targets) -> tuple[float, ...]:
    _check_batch(coords, targets)
    outputs, _, _ = forward_cached(params, cfg, np.asarray(coords))
    targets = np.asarray(targets)
    return tuple(float(np.mean((o - targets) ** 2)) for o in outputs)


def loss(params: SiameseParams, cfg: NetConfig, coords, targets) -> float:
    """Mean over heads of each head's MSE against the same targets."""
    return float(np.mean(head_losses(params, cfg, coords, targets)))


def _backward(params, cache, outputs, targets, scale):
    """Accumulate gradients for one chunk; returns (trunk_grads, head_grads, loss_sum)."""
    _, trunk_cache, head_caches = cache
    head_grads = []
    g_trunk = None
    loss_sum = 0.0
    for head, hcache, out in zip(params.heads, head_caches, outputs):
        resid = out - targets
        loss_sum += float(resid @ resid)
        g = (scale * resid)[:, None]
        grads = [None] * len(head)
        for j in range(len(head) - 1, -1, -1):
            w, _ = head[j]
            x_in, z, om = hcache[j]
            du = g if z is None else g * np.cos(z) * om
            grads[j] = (x_in.T @ du, du.sum(axis=0))
            g = du @ w.T
        head_grads.append(grads)
        g_trunk = g if g_trunk is None else g_trunk + g
    trunk_grads = [None] * len(params.shared)
    for i in range(len(params.shared) - 1, -1, -1):
        w, _ = params.shared[i]
        x_in, z, om = trunk_cache[i]
        du = g_trunk * np.cos(z) * om
        trunk_grads[i] = (x_in.T @ du, du.sum(axis=0))
        g_trunk = du @ w.T
    return trunk_grads, head_grads, loss_sum


def loss_and_grad(params: SiameseParams, cfg: NetConfig, coords, targets):
    """Loss and its exact gradient, shaped like ``params``.

    Large batches are processed in fixed-order chunks so the result does
    not depend on memory limits beyond float summation order.
    """
    coords = np.asarray(coords)
    targets = np.asarray(targets)
    _check_batch(coords, targets)
    n = len(targets)
    n_heads = len(params.heads)
    scale = 2.0 / (n_heads * n)
    total = None
    loss_sum = 0.0
    for start in range(0, n, CHUNK):
        sl = slice(start, start + CHUNK)
        cache = forward_cached(params, cfg, coords[sl])
        tg, hg, ls = _backward(params, cache, cache[0], targets[sl], scale)
        loss_sum += ls
        chunk_grad = SiameseParams(tg, hg)
        if total is None:
            total = chunk_grad
        else:
            total = SiameseParams(
                [(a[0] + b[0], a[1] + b[1]) for a, b in zip(total.shared, chunk_grad.shared)],
                [
                    [(a[0] + b[0], a[1] + b[1]) for a, b in zip(ha, hb)]
                    for ha, hb in zip(total.heads, chunk_grad.heads)
                ],
            )
    return loss_sum / (n_heads * n), total


def grad(params: SiameseParams, cfg: NetConfig, coords, targets) -> SiameseParams:
    return loss_and_grad(params, cfg, coords, targets)[1]


class Adam:
    """Adam with decoupled weight decay applied before each step."""

    def __init__(self, tensors, lr, betas=(0.9, 0.999), eps=1e-8, weight_decay=0.0):
        self.tensors = tensors
        self.lr = lr
        self.b1, self.b2 = betas
        self.eps = eps
        self.wd = weight_decay
        self.m = [np.zeros_like(t) for t in tensors]
        self.v = [np.zeros_like(t) for t in tensors]
        self.t = 0

    def step(self, grads):
        self.t += 1
        c1 = 1.0 - self.b1**self.t
        c2 = 1.0 - self.b2**self.t
        for p, g, m, v in zip(self.tensors, grads, self.m, self.v):
            if self.wd:
                p -= (self.lr * self.wd) * p
            m *= self.b1
            m += (1.0 - self.b1) * g
            v *= self.b2
            v += (1.0 - self.b2) * (g * g)
            p -= (self.lr / c1) * m / (np.sqrt(v / c2) + self.eps)


def train(
    clip: AudioClip,
    net_cfg: NetConfig,
    t_cfg: TrainConfig = TrainConfig(),
    callback: Optional[Callable[[int, float], None]] = None,
    params: Optional[SiameseParams] = None,
) -> tuple[SiameseParams, TrainReport]:
    """Fit the network to ``clip.samples`` over the normalized time grid.

    ``callback(iteration, loss)`` is invoked after every step with the
    loss measured on that step's batch (before the update).
    """
    n = len(clip.samples)
    if n == 0:
        raise ValueError("cannot train on an empty clip")
    dtype = t_cfg.dtype
    coords = encode_grid(n, net_cfg.pe, dtype)
    targets = np.asarray(clip.samples, dtype=dtype)
    if params is None:
        params = init(net_cfg, t_cfg.seed, dtype)
    else:
        params = params.astype(dtype)
    tensors = list(params.tensors())
    opt = Adam(
        tensors,
        t_cfg.learning_rate,
        (t_cfg.adam_beta1, t_cfg.adam_beta2),
        t_cfg.adam_eps,
        t_cfg.weight_decay,
    )
    rng = np.random.default_rng(np.random.SeedSequence(t_cfg.seed).spawn(4)[3])
    order = np.arange(n)
    cursor = n
    losses = np.empty(t_cfg.iterations)
    t0 = time.perf_counter()
    for it in range(t_cfg.iterations):
        if t_cfg.batch is None or t_cfg.batch >= n:
            xb, yb = coords, targets
        else:
            if cursor + t_cfg.batch > n:
                order = rng.permutation(n)
                cursor = 0
            idx = order[cursor : cursor + t_cfg.batch]
            cursor += t_cfg.batch
            xb, yb = coords[idx], targets[idx]
        value, g = loss_and_grad(params, net_cfg, xb, yb)
        if not np.isfinite(value):
            raise TrainingDiverged(it, value)
        losses[it] = value
        opt.step(list(g.tensors()))
        if callback is not None:
            callback(it, value)
    duration = time.perf_counter() - t0
    final = head_losses(params, net_cfg, coords, targets)
    log.debug("trained %d iterations in %.1f s, final loss %.3e", t_cfg.iterations, duration, np.mean(final))
    return params, TrainReport(losses, duration, final)


def reconstruct(params: SiameseParams, cfg: NetConfig, n: int, dtype=np.float32):
    """Both heads evaluated on the ``n``-point time grid."""
    return forward(params, cfg, encode_grid(n, cfg.pe, dtype))
