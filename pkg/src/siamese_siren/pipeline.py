"""End-to-end compress / decompress built from the individual modules."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .audio_io import AudioClip, crop, normalize_peak, resample_linear
from .codec import ContainerHeader, decode_file, encode_file
from .model import NetConfig, SiameseParams
from .quantizer import QuantizedModel, dequantize, quantize
from .spectral import GateConfig, StftConfig, noise_estimate, spectral_gate
from .trainer import TrainConfig, TrainReport, reconstruct, train

log = logging.getLogger(__name__)


@dataclass
class CompressResult:
    data: bytes
    params: SiameseParams
    report: TrainReport
    header: ContainerHeader
    clip: AudioClip  # the preprocessed clip the network was fitted to


def prepare(
    clip: AudioClip,
    sample_rate: Optional[int] = 22050,
    crop_seconds: Optional[float] = 10.0,
    peak: Optional[float] = 0.95,
) -> AudioClip:
    if sample_rate is not None and clip.sample_rate != sample_rate:
        clip = resample_linear(clip, sample_rate)
    if crop_seconds is not None:
        clip = crop(clip, crop_seconds)
    if peak is not None:
        clip = normalize_peak(clip, peak)
        # the header stores gain as f32; keep the in-memory value identical
        clip = AudioClip(clip.samples, clip.sample_rate, float(np.float32(clip.gain)))
    return clip


def compress(
    clip: AudioClip,
    net_cfg: NetConfig = NetConfig(),
    train_cfg: TrainConfig = TrainConfig(),
    quantized: bool = True,
    alpha: float = 2.0,
    stft_cfg: StftConfig = StftConfig(),
    gate: GateConfig = GateConfig(),
    callback: Optional[Callable[[int, float], None]] = None,
) -> CompressResult:
    """Fit ``clip`` (already preprocessed, see :func:`prepare`) and encode it."""
    params, report = train(clip, net_cfg, train_cfg, callback)
    header = ContainerHeader(
        net_cfg=net_cfg,
        sample_rate=clip.sample_rate,
        num_samples=len(clip.samples),
        gain=clip.gain,
        alpha=alpha,
        n_fft=stft_cfg.n_fft,
        hop=stft_cfg.hop,
        n_std_thresh=gate.n_std_thresh,
        quantized=quantized,
        normalized=clip.gain != 1.0,
    )
    if quantized:
        model = QuantizedModel(net_cfg, tuple(quantize(params)), clip.gain, clip.sample_rate, len(clip.samples))
    else:
        model = params
    return CompressResult(encode_file(model, header), params, report, header, clip)


def load_params(data: bytes) -> tuple[SiameseParams, ContainerHeader]:
    model, header = decode_file(data)
    if header.quantized:
        model = dequantize(model.tensors, header.net_cfg)
    return model, header


def decompress(
    data: bytes,
    sample_rate: Optional[int] = None,
    head: str = "0",
    denoise: bool = True,
    alpha: Optional[float] = None,
) -> AudioClip:
    """Evaluate the stored network on a time grid at ``sample_rate``.

    ``head`` selects ``"0"``, ``"1"`` or ``"mean"``. Denoising gates the
    selected signal against the head-0 noise estimate.
    """
    params, header = load_params(data)
    rate = header.sample_rate if sample_rate is None else int(sample_rate)
    if rate <= 0:
        raise ValueError("sample rate must be positive")
    n = int(round(header.num_samples * rate / header.sample_rate))
    f0, f1 = reconstruct(params, header.net_cfg, max(n, 1))
    if head == "0":
        signal = f0
    elif head == "1":
        signal = f1
    elif head == "mean":
        signal = (f0 + f1) / 2
    else:
        raise ValueError(f"head must be '0', '1' or 'mean', got {head!r}")
    if denoise:
        eps = noise_estimate(f0, f1, header.alpha if alpha is None else alpha)
        stft_cfg = StftConfig(header.n_fft, header.hop)
        signal = spectral_gate(signal, eps, stft_cfg, GateConfig(header.n_std_thresh)).astype(np.float32)
    samples = signal * np.float32(header.gain)
    return AudioClip(samples[:n], rate)
