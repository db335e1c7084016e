"""Siamese SIREN: a shared sine-activated trunk feeding two sine-activated heads.

Each hidden layer computes ``sin(omega * (x @ W + b))``. The first layer of
the whole network uses ``omega0``, every later hidden layer uses ``omega``.
Each head ends in a linear layer producing one amplitude per coordinate.

With an empty ``siamese`` list the network is a plain SIREN with a single
output layer; ``forward`` then returns that output for both heads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .encoding import PeConfig

Layer = tuple[np.ndarray, np.ndarray]  # (W of shape (fan_in, fan_out), b of shape (fan_out,))


@dataclass(frozen=True)
class NetConfig:
    pe: PeConfig = field(default_factory=PeConfig)
    shared: tuple[int, ...] = (256, 256)
    siamese: tuple[int, ...] = (128,)
    omega0: float = 100.0
    omega: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "shared", tuple(int(w) for w in self.shared))
        object.__setattr__(self, "siamese", tuple(int(w) for w in self.siamese))
        if any(w < 1 for w in self.shared + self.siamese):
            raise ValueError("layer widths must be positive")
        if not (self.omega0 > 0 and self.omega > 0):
            raise ValueError("omega0 and omega must be positive")

    @property
    def in_features(self) -> int:
        return self.pe.dim

    @property
    def n_heads(self) -> int:
        return 2 if self.siamese else 1

    def shared_shapes(self) -> list[tuple[int, int]]:
        dims = [self.in_features, *self.shared]
        return list(zip(dims[:-1], dims[1:]))

    def head_shapes(self) -> list[tuple[int, int]]:
        """Shapes of one head's layers, including the width-1 output layer."""
        last = self.shared[-1] if self.shared else self.in_features
        dims = [last, *self.siamese, 1]
        return list(zip(dims[:-1], dims[1:]))


@dataclass
class SiameseParams:
    shared: list[Layer]
    heads: list[list[Layer]]

    def tensors(self) -> Iterator[np.ndarray]:
        """All tensors in storage order: shared, head 0, head 1; weight then bias."""
        for layer in self.shared:
            yield from layer
        for head in self.heads:
            for layer in head:
                yield from layer

    @classmethod
    def from_tensors(cls, cfg: NetConfig, tensors) -> "SiameseParams":
        it = iter(tensors)

        def take(shapes):
            layers = []
            for i, (fan_in, fan_out) in enumerate(shapes):
                try:
                    w, b = next(it), next(it)
                except StopIteration:
                    raise ValueError("too few tensors for the network configuration") from None
                if w.shape != (fan_in, fan_out) or b.shape != (fan_out,):
                    raise ValueError(
                        f"layer {i}: expected weight {(fan_in, fan_out)} and bias {(fan_out,)}, "
                        f"got {w.shape} and {b.shape}"
                    )
                layers.append((w, b))
            return layers

        shared = take(cfg.shared_shapes())
        heads = [take(cfg.head_shapes()) for _ in range(cfg.n_heads)]
        if next(it, None) is not None:
            raise ValueError("more tensors than the network configuration needs")
        return cls(shared, heads)

    def map(self, fn) -> "SiameseParams":
        return SiameseParams(
            [(fn(w), fn(b)) for w, b in self.shared],
            [[(fn(w), fn(b)) for w, b in head] for head in self.heads],
        )

    def astype(self, dtype) -> "SiameseParams":
        return self.map(lambda a: a.astype(dtype))

    def copy(self) -> "SiameseParams":
        return self.map(np.copy)

    def size(self) -> int:
        return sum(t.size for t in self.tensors())


def param_count(cfg: NetConfig) -> int:
    def count(shapes):
        return sum(fan_in * fan_out + fan_out for fan_in, fan_out in shapes)

    return count(cfg.shared_shapes()) + cfg.n_heads * count(cfg.head_shapes())


def _init_layers(rng, shapes, omega, first_is_global_first, dtype):
    layers = []
    for i, (fan_in, fan_out) in enumerate(shapes):
        if i == 0 and first_is_global_first:
            bound = 1.0 / fan_in
        else:
            bound = np.sqrt(6.0 / fan_in) / omega
        w = rng.uniform(-bound, bound, size=(fan_in, fan_out)).astype(dtype)
        layers.append((w, np.zeros(fan_out, dtype=dtype)))
    return layers


def init(cfg: NetConfig, seed: int = 0, dtype=np.float32) -> SiameseParams:
    """SIREN initialization; the trunk and each head draw from independent streams."""
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3)]
    shared = _init_layers(streams[0], cfg.shared_shapes(), cfg.omega, True, dtype)
    heads = [
        _init_layers(streams[1 + h], cfg.head_shapes(), cfg.omega, not cfg.shared, dtype)
        for h in range(cfg.n_heads)
    ]
    return SiameseParams(shared, heads)


def _check_input(layer_index, x, w):
    if x.shape[-1] != w.shape[0]:
        raise ValueError(
            f"layer {layer_index}: input width {x.shape[-1]} does not match weight rows {w.shape[0]}"
        )


def _layer_plan(params: SiameseParams, cfg: NetConfig):
    """(omega or None for the linear output layer) per layer, in trunk-then-head order."""
    n_shared = len(params.shared)
    trunk = [cfg.omega0 if i == 0 else cfg.omega for i in range(n_shared)]
    head_len = len(params.heads[0])
    head = [
        (cfg.omega0 if (n_shared == 0 and i == 0) else cfg.omega) if i < head_len - 1 else None
        for i in range(head_len)
    ]
    return trunk, head


def forward_cached(params: SiameseParams, cfg: NetConfig, coords: np.ndarray):
    """Forward pass that also returns each layer's input and scaled pre-activation.

    Returns ``(outputs, trunk_cache, head_caches)`` where a cache entry is
    ``(x_in, omega * u, omega)`` for sine layers and ``(x_in, None, None)``
    for the output layer.
    """
    trunk_omegas, head_omegas = _layer_plan(params, cfg)
    x = coords
    trunk_cache = []
    for i, ((w, b), om) in enumerate(zip(params.shared, trunk_omegas)):
        _check_input(i, x, w)
        z = om * (x @ w + b)
        trunk_cache.append((x, z, om))
        x = np.sin(z)
    outputs, head_caches = [], []
    for head in params.heads:
        h = x
        cache = []
        for j, ((w, b), om) in enumerate(zip(head, head_omegas)):
            _check_input(len(params.shared) + j, h, w)
            u = h @ w + b
            if om is None:
                cache.append((h, None, None))
                h = u
            else:
                z = om * u
                cache.append((h, z, om))
                h = np.sin(z)
        outputs.append(h[:, 0])
        head_caches.append(cache)
    return outputs, trunk_cache, head_caches


def forward(params: SiameseParams, cfg: NetConfig, coords: np.ndarray):
    """Evaluate both heads on a batch of encoded coordinates.

    Returns ``(f0, f1)``, each of shape ``(n,)``.
    """
    coords = np.asarray(coords)
    if coords.ndim != 2 or coords.shape[1] != cfg.in_features:
        raise ValueError(
            f"layer 0: coords must have shape (n, {cfg.in_features}), got {coords.shape}"
        )
    outputs, _, _ = forward_cached(params, cfg, coords)
    if len(outputs) == 1:
        return outputs[0], outputs[0]
    return outputs[0], outputs[1]
