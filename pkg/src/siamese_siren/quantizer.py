"""Per-tensor affine int8 post-training quantization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import NetConfig, SiameseParams

QMIN, QMAX = -128, 127


@dataclass(frozen=True)
class QuantTensor:
    data: np.ndarray  # int8, already in the tensor's shape
    scale: float  # representable as float32
    zero_point: int

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def dequantize(self) -> np.ndarray:
        q = self.data.astype(np.float64) - self.zero_point
        return (np.float64(np.float32(self.scale)) * q).astype(np.float32)


@dataclass(frozen=True)
class QuantizedModel:
    net_cfg: NetConfig
    tensors: tuple[QuantTensor, ...]
    gain: float = 1.0
    sample_rate: int = 22050
    num_samples: int = 0


def quantize_tensor(values: np.ndarray, name: str = "tensor") -> QuantTensor:
    v = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    if v.size == 0:
        return QuantTensor(np.zeros(v.shape, np.int8), 1.0, 0)
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        # every element equal: store the value itself as the scale so it is exact
        if lo == 0:
            return QuantTensor(np.zeros(v.shape, np.int8), 1.0, 0)
        code = 1 if lo > 0 else -1
        return QuantTensor(np.full(v.shape, code, np.int8), float(np.float32(abs(lo))), 0)
    # the range always contains 0, keeping the zero point inside int8
    lo, hi = min(lo, 0.0), max(hi, 0.0)
    scale = float(np.float32((hi - lo) / (QMAX - QMIN)))
    zero_point = int(np.clip(np.round(QMIN - lo / scale), QMIN, QMAX))
    q = np.clip(np.round(v / scale + zero_point), QMIN, QMAX).astype(np.int8)
    return QuantTensor(q, scale, zero_point)


def quantize(params: SiameseParams) -> list[QuantTensor]:
    """Quantize every tensor, in storage order. Rounding is half-to-even."""
    return [quantize_tensor(t, f"tensor {i}") for i, t in enumerate(params.tensors())]


def dequantize(tensors, cfg: NetConfig) -> SiameseParams:
    return SiameseParams.from_tensors(cfg, [t.dequantize() for t in tensors])
