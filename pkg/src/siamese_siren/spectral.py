"""STFT, log-mel rendering, the siamese noise estimate and stationary spectral gating."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.signal import convolve2d

DB_FLOOR = -120.0


@dataclass(frozen=True)
class StftConfig:
    n_fft: int = 2048
    hop: int = 512

    def check_cola(self):
        # periodic Hann overlap-adds to a constant when hop divides n_fft at least twice
        if self.n_fft % self.hop or self.n_fft // self.hop < 2:
            raise ValueError(f"hop {self.hop} is not COLA-compliant for a Hann window of {self.n_fft}")

    @property
    def window(self) -> np.ndarray:
        return hann(self.n_fft)


@dataclass(frozen=True)
class GateConfig:
    n_std_thresh: float = 1.5
    smooth_freq: int = 2
    smooth_time: int = 4
    prop_decrease: float = field(default=1.0, init=False)


@dataclass
class Spectrogram:
    coeffs: np.ndarray  # complex, (n_fft // 2 + 1, frames)
    config: StftConfig
    sample_rate: Optional[int] = None

    @property
    def n_frames(self) -> int:
        return self.coeffs.shape[1]


def hann(n: int) -> np.ndarray:
    """Periodic Hann window."""
    return 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / n)


def _frames(padded: np.ndarray, n_fft: int, hop: int, count: int) -> np.ndarray:
    idx = np.arange(n_fft)[None, :] + hop * np.arange(count)[:, None]
    return padded[idx]


def stft(samples, cfg: StftConfig = StftConfig(), sample_rate: Optional[int] = None) -> Spectrogram:
    """Centered, reflect-padded STFT with ``ceil(len / hop)`` frames."""
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or len(x) == 0:
        raise ValueError("stft needs a non-empty 1-D signal")
    pad = cfg.n_fft // 2
    mode = "reflect" if len(x) > 1 else "edge"
    padded = np.pad(x, pad, mode=mode)
    count = -(-len(x) // cfg.hop)
    frames = _frames(padded, cfg.n_fft, cfg.hop, count) * cfg.window[None, :]
    return Spectrogram(np.fft.rfft(frames, axis=1).T, cfg, sample_rate)


def istft(spec: Spectrogram, out_len: int) -> np.ndarray:
    """Weighted overlap-add inverse, normalized by the summed squared window."""
    cfg = spec.config
    cfg.check_cola()
    win = cfg.window
    frames = np.fft.irfft(spec.coeffs.T, n=cfg.n_fft, axis=1) * win[None, :]
    count = frames.shape[0]
    total = cfg.n_fft + cfg.hop * (count - 1)
    out = np.zeros(total)
    norm = np.zeros(total)
    for k in range(count):
        start = k * cfg.hop
        out[start : start + cfg.n_fft] += frames[k]
        norm[start : start + cfg.n_fft] += win**2
    pad = cfg.n_fft // 2
    out = out[pad : pad + out_len]
    norm = norm[pad : pad + out_len]
    nz = norm > 1e-10
    out[nz] /= norm[nz]
    out[~nz] = 0.0
    if len(out) < out_len:
        out = np.concatenate([out, np.zeros(out_len - len(out))])
    return out


def to_db(spec: Spectrogram) -> np.ndarray:
    mag = np.abs(spec.coeffs)
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag)
    return np.maximum(db, DB_FLOOR)


def noise_estimate(f0, f1, alpha: float = 2.0) -> np.ndarray:
    """Scaled deviation of head 0 from the mean of both heads.

    ``alpha * (f0 - (f0 + f1) / 2)`` is evaluated as ``alpha * (f0 - f1) / 2``,
    which makes swapping the heads negate the result exactly.
    """
    f0 = np.asarray(f0)
    f1 = np.asarray(f1)
    if f0.shape != f1.shape:
        raise ValueError(f"head outputs differ in length: {f0.shape} vs {f1.shape}")
    return alpha * (f0 - f1) / 2


def gate_mask(signal_db: np.ndarray, noise_db: np.ndarray, gate: GateConfig) -> np.ndarray:
    mean = noise_db.mean(axis=1, keepdims=True)
    std = noise_db.std(axis=1, keepdims=True)
    thresh = mean + gate.n_std_thresh * std
    mask = (signal_db > thresh).astype(np.float64)
    kernel = np.ones((gate.smooth_freq, gate.smooth_time))
    kernel /= kernel.sum()
    mask = convolve2d(mask, kernel, mode="same", boundary="symm")
    return mask * gate.prop_decrease + (1.0 - gate.prop_decrease)


def spectral_gate(
    signal,
    noise=None,
    stft_cfg: StftConfig = StftConfig(),
    gate: GateConfig = GateConfig(),
) -> np.ndarray:
    """Stationary noise gate.

    Per frequency bin the threshold is ``mean + n_std_thresh * std`` of the
    noise clip's dB magnitudes over time. Cells of the signal below it are
    masked out; the binary mask is box-smoothed before being applied. With
    ``noise=None`` the signal serves as its own noise clip.
    """
    x = np.asarray(signal, dtype=np.float64)
    if len(x) == 0:
        raise ValueError("signal must be non-empty")
    spec = stft(x, stft_cfg)
    noise_spec = spec if noise is None else stft(np.asarray(noise, dtype=np.float64), stft_cfg)
    mask = gate_mask(to_db(spec), to_db(noise_spec), gate)
    gated = Spectrogram(spec.coeffs * mask, stft_cfg)
    return istft(gated, len(x))


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(sample_rate: int, n_fft: int, n_mels: int = 128) -> np.ndarray:
    """HTK-scale triangular filters, each scaled to unit area in Hz.

    Returns an ``(n_mels, n_fft // 2 + 1)`` matrix.
    """
    fft_freqs = np.arange(n_fft // 2 + 1) * sample_rate / n_fft
    edges = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2), n_mels + 2))
    lower, center, upper = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (fft_freqs[None, :] - lower) / (center - lower)
    falling = (upper - fft_freqs[None, :]) / (upper - center)
    fb = np.maximum(0.0, np.minimum(rising, falling))
    return fb * (2.0 / (upper - lower))


def log_mel(samples, sample_rate: int, n_mels: int = 128, stft_cfg: StftConfig = StftConfig()) -> np.ndarray:
    """log10 of mel-pooled power, floored at 1e-10; shape ``(n_mels, frames)``."""
    if sample_rate <= 0:
        raise ValueError("sample_rate must be positive")
    power = np.abs(stft(samples, stft_cfg).coeffs) ** 2
    mel = mel_filterbank(sample_rate, stft_cfg.n_fft, n_mels) @ power
    return np.log10(np.maximum(mel, 1e-10))
