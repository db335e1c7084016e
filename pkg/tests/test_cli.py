import json

import numpy as np
import pytest

from siamese_siren import cli
from siamese_siren.audio_io import AudioClip, load_wav, save_wav
from siamese_siren.codec import decode_file
from siamese_siren.pipeline import decompress, load_params
from siamese_siren.trainer import reconstruct

SMALL = ["--iters", "30", "--shared", "1x16", "--siamese", "1x8", "--pe-L", "4",
         "--sample-rate", "8000", "--crop", "0.25", "--lr", "1e-3"]


def write_tone(path, rate=8000, seconds=0.5, freq=300.0, fmt="pcm16"):
    t = np.arange(int(rate * seconds)) / rate
    save_wav(AudioClip(0.4 * np.sin(2 * np.pi * freq * t), rate), path, fmt)
    return path


@pytest.fixture(scope="module")
def compressed(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    wav = write_tone(d / "in.wav")
    out = d / "out.ssir"
    assert cli.main(["compress", str(wav), str(out), *SMALL]) == 0
    return d, wav, out


def test_compress_writes_container(compressed):
    _, _, out = compressed
    model, header = decode_file(out.read_bytes())
    assert header.quantized and header.normalized
    assert header.sample_rate == 8000 and header.num_samples == 2000
    assert header.net_cfg.shared == (16,) and header.net_cfg.siamese == (8,)
    assert header.alpha == 2.0


def test_no_quant_file_is_about_four_times_larger(compressed, tmp_path):
    _, wav, out = compressed
    big = tmp_path / "f.ssir"
    assert cli.main(["compress", str(wav), str(big), *SMALL, "--no-quant"]) == 0
    ratio = big.stat().st_size / out.stat().st_size
    assert 3.0 < ratio <= 4.0


def test_decompress_at_double_rate(compressed, tmp_path):
    _, _, out = compressed
    wav = tmp_path / "up.wav"
    assert cli.main(["decompress", str(out), str(wav), "--sample-rate", "16000"]) == 0
    clip = load_wav(wav)
    assert clip.sample_rate == 16000
    assert len(clip.samples) == 4000


def test_decompress_no_denoise_matches_forward(compressed, tmp_path):
    _, _, out = compressed
    wav = tmp_path / "raw.wav"
    assert cli.main(["decompress", str(out), str(wav), "--no-denoise"]) == 0
    params, header = load_params(out.read_bytes())
    f0, _ = reconstruct(params, header.net_cfg, header.num_samples)
    expected = f0 * np.float32(header.gain)
    np.testing.assert_array_equal(load_wav(wav).samples, expected)


def test_decompress_head_mean(compressed):
    _, _, out = compressed
    data = out.read_bytes()
    params, header = load_params(data)
    f0, f1 = reconstruct(params, header.net_cfg, header.num_samples)
    got = decompress(data, head="mean", denoise=False).samples
    np.testing.assert_array_equal(got, ((f0 + f1) / 2) * np.float32(header.gain))


def test_decompress_denoised_and_pcm16(compressed, tmp_path):
    _, _, out = compressed
    wav = tmp_path / "d.wav"
    assert cli.main(["decompress", str(out), str(wav), "--format", "pcm16", "--head", "1"]) == 0
    assert len(load_wav(wav).samples) == 2000


def test_eval_identical(compressed, capsys):
    _, wav, _ = compressed
    assert cli.main(["eval", str(wav), str(wav)]) == 0
    assert capsys.readouterr().out.strip() == "mse=0.000000e+00 snr_db=inf lsd=0.0000"


def test_eval_golden_text(tmp_path, capsys):
    ref = write_tone(tmp_path / "ref.wav", fmt="float32")
    clip = load_wav(ref)
    noisy = clip.samples + np.random.default_rng(0).normal(0, 0.01, len(clip.samples)).astype(np.float32)
    test = tmp_path / "test.wav"
    save_wav(AudioClip(noisy, clip.sample_rate), test, "float32")
    assert cli.main(["eval", str(ref), str(test)]) == 0
    first = capsys.readouterr().out
    assert first == "mse=9.968434e-05 snr_db=29.0446 lsd=57.3097\n"
    assert cli.main(["eval", str(ref), str(test), "--json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert set(d) == {"mse", "snr_db", "lsd"}


def test_eval_resamples_to_lower_rate(tmp_path, capsys):
    a = write_tone(tmp_path / "a.wav", rate=16000)
    b = write_tone(tmp_path / "b.wav", rate=8000)
    assert cli.main(["eval", str(a), str(b)]) == 0
    assert capsys.readouterr().out.startswith("mse=")


def test_eval_with_compression_ratio(compressed, capsys):
    _, wav, out = compressed
    assert cli.main(["eval", str(wav), str(wav), "--compressed", str(out)]) == 0
    assert "compression_ratio=" in capsys.readouterr().out


def read_pgm(path):
    data = path.read_bytes()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    assert magic == b"P5" and maxval == b"255"
    w, h = map(int, dims.split())
    return np.frombuffer(rest, np.uint8).reshape(h, w)


def test_spectrogram_of_silence_is_black(tmp_path):
    wav = tmp_path / "z.wav"
    save_wav(AudioClip(np.zeros(5000), 8000), wav)
    pgm = tmp_path / "z.pgm"
    assert cli.main(["spectrogram", str(wav), str(pgm), "--n-mels", "40"]) == 0
    img = read_pgm(pgm)
    assert img.shape == (40, -(-5000 // 512))
    assert np.all(img == 0)


def test_noise_demo(tmp_path, capsys):
    wav = write_tone(tmp_path / "t.wav", rate=22050, seconds=2.0, fmt="float32")
    assert cli.main(["noise-demo", str(wav), str(tmp_path / "demo")]) == 0
    line = capsys.readouterr().out
    mse = float(line.split()[0].split("=")[1])
    assert mse == pytest.approx(1e-3, rel=0.05)
    clean, noisy = read_pgm(tmp_path / "demo_clean.pgm"), read_pgm(tmp_path / "demo_noisy.pgm")
    # the spectrogram changes visibly although the waveform error is tiny
    assert np.mean(np.abs(clean.astype(int) - noisy.astype(int))) > 20
    assert (tmp_path / "demo_noisy.wav").exists()


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["compress", "--help"])
    assert e.value.code == 0
    text = " ".join(capsys.readouterr().out.split())
    for flag, default in [("--iters", "2500"), ("--lr", "0.0001"), ("--wd", "1e-05"),
                          ("--omega0", "100.0"), ("--omega", "100.0"), ("--pe-L", "16"),
                          ("--sigma", "2.0"), ("--alpha", "2.0"), ("--shared", "2x256"),
                          ("--siamese", "1x128"), ("--crop", "10.0"), ("--sample-rate", "22050")]:
        assert flag in text
        assert f"(default: {default})" in text


@pytest.mark.parametrize(
    "argv",
    [
        ["compress", "a.wav", "b.ssir", "--shared", "2by256"],
        ["compress", "a.wav", "b.ssir", "--iters", "-3"],
        ["compress", "a.wav", "b.ssir", "--lr", "fast"],
        ["compress", "a.wav", "b.ssir", "--peak", "1.5"],
        ["compress", "a.wav", "b.ssir", "--pe-L", "-1"],
        ["decompress", "a.ssir", "b.wav", "--sample-rate", "0"],
        ["decompress", "a.ssir", "b.wav", "--head", "2"],
        ["frobnicate"],
        [],
    ],
)
def test_invalid_flags_are_usage_errors(argv):
    with pytest.raises(SystemExit) as e:
        cli.main(argv)
    assert e.value.code == cli.EXIT_USAGE


def test_parse_layers():
    assert cli.parse_layers("2x256") == (256, 256)
    assert cli.parse_layers("0") == ()
    assert cli.parse_layers("64,32") == (64, 32)


def test_error_exit_codes(tmp_path):
    assert cli.main(["compress", str(tmp_path / "missing.wav"), str(tmp_path / "o.ssir")]) == cli.EXIT_IO
    junk = tmp_path / "junk.ssir"
    junk.write_bytes(b"NOPE" + bytes(100))
    assert cli.main(["decompress", str(junk), str(tmp_path / "o.wav")]) == cli.EXIT_FORMAT
    silent = tmp_path / "silent.wav"
    save_wav(AudioClip(np.zeros(100), 8000), silent)
    assert cli.main(["compress", str(silent), str(tmp_path / "o.ssir"), *SMALL]) == cli.EXIT_ERROR


def test_compress_is_deterministic(compressed, tmp_path):
    _, wav, out = compressed
    again = tmp_path / "again.ssir"
    assert cli.main(["compress", str(wav), str(again), *SMALL]) == 0
    assert again.read_bytes() == out.read_bytes()
