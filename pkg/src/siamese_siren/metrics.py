"""Reconstruction quality (SNR, log-spectral distance) and compression ratio."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .audio_io import AudioClip
from .spectral import StftConfig, stft, to_db

# snr() returns this for a bit-exact reconstruction
EXACT_MATCH = math.inf


@dataclass(frozen=True)
class EvalResult:
    mse: float
    snr_db: float
    lsd: float
    compression_ratio: Optional[float] = None

    def to_text(self) -> str:
        parts = [f"mse={self.mse:.6e}", f"snr_db={_fmt(self.snr_db)}", f"lsd={self.lsd:.4f}"]
        if self.compression_ratio is not None:
            parts.append(f"compression_ratio={self.compression_ratio:.4f}")
        return " ".join(parts)

    def to_json(self) -> str:
        d = {k: v for k, v in asdict(self).items() if v is not None}
        return json.dumps({k: (str(v) if isinstance(v, float) and math.isinf(v) else v) for k, v in d.items()})


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.4f}"


def _pair(ref, test):
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise ValueError(f"length mismatch: {ref.shape} vs {test.shape}")
    return ref, test


def mse(ref, test) -> float:
    ref, test = _pair(ref, test)
    return float(np.mean((ref - test) ** 2))


def snr(ref, test) -> float:
    """10 log10(signal energy / error energy) in dB; ``inf`` on exact match."""
    ref, test = _pair(ref, test)
    signal = float(np.sum(ref**2))
    if signal == 0:
        raise ValueError("reference is all zeros")
    err = float(np.sum((ref - test) ** 2))
    if err == 0:
        return EXACT_MATCH
    return 10.0 * math.log10(signal / err)


def lsd(ref, test, stft_cfg: StftConfig = StftConfig()) -> float:
    """Frame-averaged RMS (over bins) difference of dB magnitude spectra."""
    ref, test = _pair(ref, test)
    diff = to_db(stft(ref, stft_cfg)) - to_db(stft(test, stft_cfg))
    return float(np.mean(np.sqrt(np.mean(diff**2, axis=0))))


def compression_ratio(original_bytes: int, compressed_bytes: int) -> float:
    if original_bytes <= 0 or compressed_bytes <= 0:
        raise ValueError("sizes must be positive")
    return original_bytes / compressed_bytes


def source_bytes(num_samples: int, bytes_per_sample: int = 2) -> int:
    """Payload size of the source audio (PCM16 by default)."""
    return num_samples * bytes_per_sample


def add_noise(clip: AudioClip, variance: float, seed: int = 0) -> AudioClip:
    """Add i.i.d. zero-mean Gaussian noise of the given variance."""
    if variance < 0:
        raise ValueError("variance must be non-negative")
    if variance == 0:
        return AudioClip(clip.samples.copy(), clip.sample_rate, clip.gain)
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, math.sqrt(variance), size=len(clip.samples))
    noisy = np.asarray(clip.samples, dtype=np.float64) + noise
    return AudioClip(noisy.astype(clip.samples.dtype), clip.sample_rate, clip.gain)


def evaluate(ref, test, stft_cfg: StftConfig = StftConfig(), compression: Optional[float] = None) -> EvalResult:
    return EvalResult(mse(ref, test), snr(ref, test), lsd(ref, test, stft_cfg), compression)
