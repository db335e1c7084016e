"""The ``.ssir`` container: a little-endian, fixed-layout model file.

Layout (all integers unsigned unless noted, little-endian)::

    magic        4s   b"SSIR"
    version      u16
    flags        u16  bit0 quantized, bit1 peak-normalized
    sample_rate  u32
    num_samples  u64
    gain         f32
    pe_L         u16
    pe_sigma     f32
    omega0       f32
    omega        f32
    alpha        f32
    n_fft        u32  \
    hop          u32   } spectral gate settings used at decode time
    n_std_thresh f32  /
    shared       u16 count, then count x u16 widths
    siamese      u16 count, then count x u16 widths

followed by every tensor in storage order (trunk, head 0, head 1; weight
then bias). Each tensor is ``u8 rank, rank x u32 dims`` and then either
``f32 scale, i8 zero_point, int8 payload`` (quantized) or a raw ``f32``
payload (float mode).

See docs/ssir_format.md for the size formula.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .encoding import PeConfig
from .model import NetConfig, SiameseParams
from .quantizer import QuantizedModel, QuantTensor

MAGIC = b"SSIR"
VERSION = 1

FLAG_QUANTIZED = 1
FLAG_NORMALIZED = 2

_FIXED = struct.Struct("<4sHHIQfHffffIIf")
FIXED_HEADER_SIZE = _FIXED.size


class ContainerError(ValueError):
    pass


class BadMagic(ContainerError):
    pass


class UnsupportedVersion(ContainerError):
    pass


class TruncatedPayload(ContainerError):
    pass


class ShapeMismatch(ContainerError):
    pass


@dataclass(frozen=True)
class ContainerHeader:
    net_cfg: NetConfig = field(default_factory=NetConfig)
    sample_rate: int = 22050
    num_samples: int = 0
    gain: float = 1.0
    alpha: float = 2.0
    n_fft: int = 2048
    hop: int = 512
    n_std_thresh: float = 1.5
    quantized: bool = True
    normalized: bool = True
    version: int = VERSION

    @property
    def flags(self) -> int:
        return (FLAG_QUANTIZED if self.quantized else 0) | (FLAG_NORMALIZED if self.normalized else 0)

    @property
    def duration(self) -> float:
        return self.num_samples / self.sample_rate


def header_size(cfg: NetConfig) -> int:
    return FIXED_HEADER_SIZE + 2 + 2 * len(cfg.shared) + 2 + 2 * len(cfg.siamese)


def tensor_shapes(cfg: NetConfig) -> list[tuple[int, ...]]:
    shapes = []
    for fan_in, fan_out in cfg.shared_shapes():
        shapes += [(fan_in, fan_out), (fan_out,)]
    for _ in range(cfg.n_heads):
        for fan_in, fan_out in cfg.head_shapes():
            shapes += [(fan_in, fan_out), (fan_out,)]
    return shapes


def file_size(cfg: NetConfig, quantized: bool) -> int:
    """Exact byte size of an encoded file for ``cfg``."""
    total = header_size(cfg)
    for shape in tensor_shapes(cfg):
        n = int(np.prod(shape))
        total += 1 + 4 * len(shape)
        total += (4 + 1 + n) if quantized else 4 * n
    return total


def _pack_widths(widths) -> bytes:
    return struct.pack(f"<H{len(widths)}H", len(widths), *widths)


def encode_file(model: QuantizedModel | SiameseParams, header: ContainerHeader) -> bytes:
    quantized = isinstance(model, QuantizedModel)
    if quantized != header.quantized:
        raise ValueError("header.quantized does not match the model type")
    cfg = header.net_cfg
    if quantized and model.net_cfg != cfg:
        raise ValueError("model.net_cfg differs from header.net_cfg")
    tensors = list(model.tensors) if quantized else list(model.tensors())
    expected = tensor_shapes(cfg)
    if [tuple(t.shape) for t in tensors] != expected:
        raise ShapeMismatch("tensor shapes do not chain according to the header's network config")
    if any(w > 0xFFFF for w in cfg.shared + cfg.siamese):
        raise ValueError("layer widths must fit in u16")

    out = bytearray(
        _FIXED.pack(
            MAGIC,
            header.version,
            header.flags,
            header.sample_rate,
            header.num_samples,
            header.gain,
            cfg.pe.L,
            cfg.pe.sigma,
            cfg.omega0,
            cfg.omega,
            header.alpha,
            header.n_fft,
            header.hop,
            header.n_std_thresh,
        )
    )
    out += _pack_widths(cfg.shared)
    out += _pack_widths(cfg.siamese)
    for t in tensors:
        out += struct.pack(f"<B{len(t.shape)}I", len(t.shape), *t.shape)
        if quantized:
            out += struct.pack("<fb", t.scale, t.zero_point)
            out += np.ascontiguousarray(t.data, dtype=np.int8).tobytes()
        else:
            out += np.ascontiguousarray(t, dtype="<f4").tobytes()
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, n: int, what: str) -> memoryview:
        if self.pos + n > len(self.data):
            raise TruncatedPayload(
                f"truncated payload: need {n} bytes for {what} at offset {self.pos}, "
                f"only {len(self.data) - self.pos} left"
            )
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str, what: str):
        s = struct.Struct(fmt)
        return s.unpack(self.take(s.size, what))


def decode_file(data: bytes):
    """Inverse of :func:`encode_file`; returns ``(model, header)``."""
    r = _Reader(data)
    if len(data) >= 4 and bytes(data[:4]) != MAGIC:
        raise BadMagic(f"bad magic {bytes(data[:4])!r}, expected {MAGIC!r}")
    (magic, version, flags, sample_rate, num_samples, gain, pe_L, pe_sigma,
     omega0, omega, alpha, n_fft, hop, n_std) = r.unpack(_FIXED.format, "header")
    if version != VERSION:
        raise UnsupportedVersion(f"unsupported container version {version}")
    (n_shared,) = r.unpack("<H", "shared width count")
    shared = r.unpack(f"<{n_shared}H", "shared widths")
    (n_siam,) = r.unpack("<H", "siamese width count")
    siamese = r.unpack(f"<{n_siam}H", "siamese widths")
    try:
        cfg = NetConfig(PeConfig(pe_L, pe_sigma), shared, siamese, omega0, omega)
    except ValueError as exc:
        raise ShapeMismatch(f"header describes an invalid network: {exc}") from exc
    header = ContainerHeader(
        net_cfg=cfg,
        sample_rate=sample_rate,
        num_samples=num_samples,
        gain=gain,
        alpha=alpha,
        n_fft=n_fft,
        hop=hop,
        n_std_thresh=n_std,
        quantized=bool(flags & FLAG_QUANTIZED),
        normalized=bool(flags & FLAG_NORMALIZED),
        version=version,
    )

    tensors = []
    for i, expected in enumerate(tensor_shapes(cfg)):
        (rank,) = r.unpack("<B", f"tensor {i} rank")
        shape = r.unpack(f"<{rank}I", f"tensor {i} dims")
        if shape != expected:
            raise ShapeMismatch(f"tensor {i}: stored shape {shape}, network expects {expected}")
        n = int(np.prod(shape))
        if header.quantized:
            scale, zp = r.unpack("<fb", f"tensor {i} quantization header")
            q = np.frombuffer(r.take(n, f"tensor {i} payload"), dtype=np.int8).reshape(shape)
            tensors.append(QuantTensor(q.copy(), scale, zp))
        else:
            a = np.frombuffer(r.take(4 * n, f"tensor {i} payload"), dtype="<f4").reshape(shape)
            tensors.append(a.astype(np.float32))
    if r.pos != len(data):
        raise ContainerError(f"{len(data) - r.pos} trailing bytes after the last tensor")

    if header.quantized:
        model = QuantizedModel(cfg, tuple(tensors), gain, sample_rate, num_samples)
    else:
        model = SiameseParams.from_tensors(cfg, tensors)
    return model, header
