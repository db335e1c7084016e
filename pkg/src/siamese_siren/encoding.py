"""Normalized time coordinates and their Fourier positional encoding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PeConfig:
    """``L`` sin/cos pairs at frequencies ``sigma**k * pi`` for k = 0..L-1."""

    L: int = 16
    sigma: float = 2.0

    def __post_init__(self):
        if self.L < 0:
            raise ValueError("L must be non-negative")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    @property
    def dim(self) -> int:
        return 2 * self.L + 1


def time_grid(n: int) -> np.ndarray:
    """``n`` evenly spaced points on [-1, 1]; a single point sits at 0."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1:
        return np.zeros(1)
    return np.linspace(-1.0, 1.0, n)


def positional_encode(t, cfg: PeConfig = PeConfig()) -> np.ndarray:
    """Embed time values ``t`` as ``(t, sin(s0 pi t), cos(s0 pi t), ...)``.

    Scalar input gives a vector of length ``2L + 1``; an array of shape
    ``(n,)`` gives an ``(n, 2L + 1)`` matrix. Computed in float64.
    """
    t = np.asarray(t, dtype=np.float64)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty((t.shape[0], cfg.dim))
    out[:, 0] = t
    if cfg.L:
        freqs = np.pi * cfg.sigma ** np.arange(cfg.L, dtype=np.float64)
        phase = t[:, None] * freqs[None, :]
        out[:, 1::2] = np.sin(phase)
        out[:, 2::2] = np.cos(phase)
    return out[0] if scalar else out


def encode_grid(n: int, cfg: PeConfig, dtype=np.float32) -> np.ndarray:
    """Encoded coordinates for an ``n``-sample clip, as fed to the network.

    Training and decoding both go through here so that decoding at the
    training length reproduces the training inputs bit for bit.
    """
    return positional_encode(time_grid(n), cfg).astype(dtype)
