"""Audio compression by overfitting a Siamese SIREN and quantizing its weights."""

from .audio_io import AudioClip, crop, load_wav, normalize_peak, resample_linear, save_wav
from .codec import ContainerHeader, decode_file, encode_file
from .encoding import PeConfig, positional_encode, time_grid
from .model import NetConfig, SiameseParams, forward, init, param_count
from .pipeline import compress, decompress, prepare
from .quantizer import QuantizedModel, QuantTensor, dequantize, quantize
from .spectral import GateConfig, StftConfig, istft, log_mel, noise_estimate, spectral_gate, stft
from .trainer import TrainConfig, TrainReport, train

__version__ = "0.1.0"
