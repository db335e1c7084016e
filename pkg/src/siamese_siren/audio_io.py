"""Mono audio clips: WAV I/O, cropping, linear resampling and peak normalization."""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.io import wavfile


class WavFormatError(ValueError):
    """The file is RIFF/WAVE but stores samples in a codec we do not read."""


@dataclass(frozen=True)
class AudioClip:
    samples: np.ndarray
    sample_rate: int
    gain: float = 1.0

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if not self.gain > 0:
            raise ValueError(f"gain must be positive, got {self.gain}")

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def load_wav(path: str | os.PathLike) -> AudioClip:
    """Read a PCM16 or float32 WAV file and mix it down to mono.

    PCM16 codes are divided by 32768; channels are averaged per frame.
    """
    try:
        with warnings.catch_warnings():
            # scipy warns about unknown chunks (LIST, fact, ...); they are harmless
            warnings.simplefilter("ignore", wavfile.WavFileWarning)
            rate, data = wavfile.read(os.fspath(path))
    except ValueError as exc:
        msg = str(exc)
        if "format" in msg.lower():
            raise WavFormatError(f"{os.fspath(path)}: fmt chunk: {msg}") from exc
        raise
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data
    else:
        raise WavFormatError(
            f"{os.fspath(path)}: fmt chunk: unsupported sample type {data.dtype} "
            "(expected 16-bit PCM or 32-bit IEEE float)"
        )
    if samples.ndim == 2:
        samples = samples.mean(axis=1, dtype=np.float64)
    return AudioClip(np.asarray(samples, dtype=np.float32), int(rate))


def save_wav(clip: AudioClip, path: str | os.PathLike, format: str = "float32") -> None:
    """Write a mono WAV file as ``pcm16`` or ``float32``."""
    x = np.asarray(clip.samples, dtype=np.float64)
    if format == "pcm16":
        scaled = x * 32768.0
        # round half away from zero, then clamp
        codes = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
        data = np.clip(codes, -32768, 32767).astype(np.int16)
    elif format == "float32":
        data = np.asarray(clip.samples, dtype=np.float32)
    else:
        raise ValueError(f"unknown WAV format {format!r}; use 'pcm16' or 'float32'")
    wavfile.write(os.fspath(path), int(clip.sample_rate), data)


def crop(clip: AudioClip, seconds: float) -> AudioClip:
    if seconds <= 0:
        raise ValueError("seconds must be positive")
    n = int(np.floor(seconds * clip.sample_rate))
    return replace(clip, samples=clip.samples[:n])


def resample_linear(clip: AudioClip, new_rate: int) -> AudioClip:
    """Linear interpolation onto a new sample grid, holding the last sample past the end."""
    if new_rate <= 0:
        raise ValueError("new_rate must be positive")
    if new_rate == clip.sample_rate:
        return replace(clip, samples=clip.samples.copy())
    n = len(clip.samples)
    m = int(round(n * new_rate / clip.sample_rate))
    positions = np.arange(m) * (clip.sample_rate / new_rate)
    out = np.interp(positions, np.arange(n), clip.samples)
    return AudioClip(out.astype(clip.samples.dtype), int(new_rate), clip.gain)


def normalize_peak(clip: AudioClip, peak: float = 0.95) -> AudioClip:
    """Scale so that max |sample| equals ``peak``.

    The returned clip's ``gain`` is ``old_peak / peak``; multiplying the
    samples by it undoes the normalization.
    """
    if not 0 < peak <= 1:
        raise ValueError("peak must lie in (0, 1]")
    x = np.asarray(clip.samples, dtype=np.float64)
    old_peak = float(np.max(np.abs(x))) if len(x) else 0.0
    if old_peak == 0:
        raise ValueError("cannot peak-normalize an all-zero clip")
    if old_peak == peak:
        return replace(clip, samples=clip.samples.copy(), gain=1.0)
    gain = old_peak / peak
    return AudioClip((x / gain).astype(clip.samples.dtype), clip.sample_rate, gain)
