"""Command-line front end: compress, decompress, eval, spectrogram, noise-demo."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import metrics
from .audio_io import AudioClip, WavFormatError, load_wav, resample_linear, save_wav
from .codec import ContainerError
from .encoding import PeConfig
from .model import NetConfig
from .pipeline import compress, decompress, prepare
from .spectral import GateConfig, StftConfig, log_mel
from .trainer import TrainConfig, TrainingDiverged

log = logging.getLogger("siamese_siren")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_DIVERGED = 5


def parse_layers(text: str) -> tuple[int, ...]:
    """Parse ``"2x256"`` (or ``"256,128"``, or ``"0"``) into a width tuple."""
    text = text.strip().lower()
    if text in ("", "0", "none"):
        return ()
    try:
        if "x" in text:
            count, width = text.split("x")
            count, width = int(count), int(width)
            if count < 0 or width < 1:
                raise ValueError
            return (width,) * count
        widths = tuple(int(w) for w in text.split(","))
        if any(w < 1 for w in widths):
            raise ValueError
        return widths
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid layer spec {text!r}; use e.g. 2x256") from None


def _positive(kind):
    def conv(text):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid value {text!r}") from None
        if not value > 0:
            raise argparse.ArgumentTypeError(f"{text} must be positive")
        return value

    return conv


def _non_negative(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid value {text!r}") from None
    if value < 0 or not np.isfinite(value):
        raise argparse.ArgumentTypeError(f"{text} must be a finite non-negative number")
    return value


def _peak(text):
    value = _positive(float)(text)
    if value > 1:
        raise argparse.ArgumentTypeError("peak must lie in (0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="siamese-siren", description=__doc__, formatter_class=fmt)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="fit a network to a WAV file and write .ssir", formatter_class=fmt)
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)
    p.add_argument("--iters", type=_positive(int), default=2500, help="training iterations")
    p.add_argument("--lr", type=_non_negative, default=1e-4, help="Adam learning rate")
    p.add_argument("--wd", type=_non_negative, default=1e-5, help="decoupled weight decay")
    p.add_argument("--omega0", type=_positive(float), default=100.0, help="first-layer frequency scale")
    p.add_argument("--omega", type=_positive(float), default=100.0, help="hidden-layer frequency scale")
    p.add_argument("--pe-L", dest="pe_L", type=int, default=16, choices=range(0, 64), metavar="L",
                   help="number of positional-encoding frequencies")
    p.add_argument("--sigma", type=_positive(float), default=2.0, help="positional-encoding frequency base")
    p.add_argument("--shared", type=parse_layers, default="2x256", help="shared trunk layers, NxW")
    p.add_argument("--siamese", type=parse_layers, default="1x128", help="per-head layers, NxW (0 = plain SIREN)")
    p.add_argument("--alpha", type=_non_negative, default=2.0, help="noise-estimate amplitude stored in the file")
    p.add_argument("--n-std-thresh", type=_non_negative, default=1.5, help="spectral gate threshold in std units")
    p.add_argument("--crop", type=_positive(float), default=10.0, help="seconds kept from the start")
    p.add_argument("--sample-rate", type=_positive(int), default=22050, help="training sample rate in Hz")
    p.add_argument("--peak", type=_peak, default=0.95, help="peak amplitude after normalization")
    p.add_argument("--no-normalize", action="store_true", help="skip peak normalization")
    p.add_argument("--no-quant", action="store_true", help="store float32 weights instead of int8")
    p.add_argument("--batch", type=_positive(int), default=None, help="mini-batch size (default: full clip)")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("decompress", help="decode .ssir to WAV", formatter_class=fmt)
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)
    p.add_argument("--no-denoise", action="store_true", help="skip spectral gating")
    p.add_argument("--alpha", type=_non_negative, default=None, help="override the stored noise-estimate amplitude")
    p.add_argument("--head", choices=["0", "1", "mean"], default="0", help="which head to output")
    p.add_argument("--sample-rate", type=_positive(int), default=None,
                   help="output rate in Hz (default: the training rate)")
    p.add_argument("--format", choices=["float32", "pcm16"], default="float32")

    p = sub.add_parser("eval", help="compare a reference and a test WAV", formatter_class=fmt)
    p.add_argument("reference", type=Path)
    p.add_argument("test", type=Path)
    p.add_argument("--json", action="store_true", help="print JSON instead of key=value")
    p.add_argument("--compressed", type=Path, default=None,
                   help=".ssir file; adds compression_ratio against the PCM16 reference size")

    p = sub.add_parser("spectrogram", help="render a log-mel spectrogram as PGM", formatter_class=fmt)
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)
    p.add_argument("--n-mels", type=_positive(int), default=128)

    p = sub.add_parser("noise-demo", help="add Gaussian noise and render both spectrograms", formatter_class=fmt)
    p.add_argument("input", type=Path)
    p.add_argument("prefix", type=Path, help="writes PREFIX_noisy.wav, PREFIX_clean.pgm, PREFIX_noisy.pgm")
    p.add_argument("--variance", type=_non_negative, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-mels", type=_positive(int), default=128)
    return parser


def log_mel_to_pgm(logmel: np.ndarray) -> bytes:
    """8-bit grayscale PGM; rows are mel bands (lowest band at the bottom)."""
    db = 10.0 * logmel
    pixels = np.round((np.clip(db, -80.0, 0.0) + 80.0) / 80.0 * 255.0).astype(np.uint8)
    pixels = pixels[::-1]
    header = f"P5\n{pixels.shape[1]} {pixels.shape[0]}\n255\n".encode("ascii")
    return header + pixels.tobytes()


def write_spectrogram(clip: AudioClip, path: Path, n_mels: int) -> tuple[int, int]:
    lm = log_mel(clip.samples, clip.sample_rate, n_mels)
    path.write_bytes(log_mel_to_pgm(lm))
    return lm.shape


def cmd_compress(args) -> int:
    clip = load_wav(args.input)
    clip = prepare(clip, args.sample_rate, args.crop, None if args.no_normalize else args.peak)
    net_cfg = NetConfig(PeConfig(args.pe_L, args.sigma), args.shared, args.siamese, args.omega0, args.omega)
    train_cfg = TrainConfig(args.iters, args.lr, args.wd, batch=args.batch, seed=args.seed)

    def progress(it, value):
        if it % 100 == 0 or it == args.iters - 1:
            log.info("iteration %d loss %.6e", it, value)

    t0 = time.perf_counter()
    result = compress(
        clip, net_cfg, train_cfg, not args.no_quant, args.alpha,
        gate=GateConfig(args.n_std_thresh), callback=progress,
    )
    args.output.write_bytes(result.data)
    ratio = metrics.compression_ratio(metrics.source_bytes(len(clip.samples)), len(result.data))
    log.info("trained in %.1f s; final loss per head %s", time.perf_counter() - t0,
             ", ".join(f"{v:.3e}" for v in result.report.final_head_losses))
    log.info("wrote %s: %d bytes, compression ratio %.2f vs PCM16", args.output, len(result.data), ratio)
    return EXIT_OK


def cmd_decompress(args) -> int:
    data = args.input.read_bytes()
    clip = decompress(data, args.sample_rate, args.head, not args.no_denoise, args.alpha)
    save_wav(clip, args.output, args.format)
    log.info("wrote %s: %d samples at %d Hz", args.output, len(clip.samples), clip.sample_rate)
    return EXIT_OK


def cmd_eval(args) -> int:
    ref = load_wav(args.reference)
    test = load_wav(args.test)
    rate = min(ref.sample_rate, test.sample_rate)
    ref, test = resample_linear(ref, rate), resample_linear(test, rate)
    n = min(len(ref.samples), len(test.samples))
    ratio = None
    if args.compressed is not None:
        ratio = metrics.compression_ratio(metrics.source_bytes(len(ref.samples)), args.compressed.stat().st_size)
    result = metrics.evaluate(ref.samples[:n], test.samples[:n], compression=ratio)
    print(result.to_json() if args.json else result.to_text())
    return EXIT_OK


def cmd_spectrogram(args) -> int:
    clip = load_wav(args.input)
    n_mels, frames = write_spectrogram(clip, args.output, args.n_mels)
    log.info("wrote %s: %d mel bands x %d frames", args.output, n_mels, frames)
    return EXIT_OK


def cmd_noise_demo(args) -> int:
    clip = load_wav(args.input)
    noisy = metrics.add_noise(clip, args.variance, args.seed)
    prefix = str(args.prefix)
    save_wav(noisy, prefix + "_noisy.wav", "float32")
    write_spectrogram(clip, Path(prefix + "_clean.pgm"), args.n_mels)
    write_spectrogram(noisy, Path(prefix + "_noisy.pgm"), args.n_mels)
    wave_mse = metrics.mse(clip.samples, noisy.samples)
    mel_diff = float(np.mean(np.abs(
        10 * log_mel(clip.samples, clip.sample_rate, args.n_mels)
        - 10 * log_mel(noisy.samples, noisy.sample_rate, args.n_mels)
    )))
    print(f"waveform_mse={wave_mse:.6e} mean_abs_log_mel_diff_db={mel_diff:.4f}")
    return EXIT_OK


COMMANDS = {
    "compress": cmd_compress,
    "decompress": cmd_decompress,
    "eval": cmd_eval,
    "spectrogram": cmd_spectrogram,
    "noise-demo": cmd_noise_demo,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (WavFormatError, ContainerError) as exc:
        log.error("%s", exc)
        return EXIT_FORMAT
    except TrainingDiverged as exc:
        log.error("%s", exc)
        return EXIT_DIVERGED
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
