import json
import math

import numpy as np
import pytest

from siamese_siren.audio_io import AudioClip
from siamese_siren.codec import file_size
from siamese_siren.encoding import PeConfig
from siamese_siren.metrics import (
    EXACT_MATCH,
    EvalResult,
    add_noise,
    compression_ratio,
    evaluate,
    lsd,
    snr,
    source_bytes,
)
from siamese_siren.model import NetConfig


def sine(n=8000, amp=1.0):
    return amp * np.sin(2 * np.pi * 100 * np.arange(n) / 8000)


def test_snr_exact_match():
    x = sine()
    assert snr(x, x.copy()) == EXACT_MATCH


def test_snr_zero_test_is_zero_db():
    x = sine()
    assert snr(x, np.zeros_like(x)) == pytest.approx(0.0, abs=1e-12)


def test_snr_of_known_noise_level():
    # signal power 0.5, noise power 0.01: 10 log10(50) = 16.99 dB
    x = sine(80000)
    y = x + np.random.default_rng(0).normal(0, 0.1, x.shape)
    assert snr(x, y) == pytest.approx(10 * math.log10(0.5 / 0.01), abs=0.5)


def test_snr_errors():
    with pytest.raises(ValueError):
        snr(np.zeros(4), np.ones(4))
    with pytest.raises(ValueError):
        snr(np.ones(4), np.ones(5))


def test_snr_monotone_in_noise():
    x = sine(22050)
    values = [snr(x, add_noise(AudioClip(x, 8000), v, seed=1).samples) for v in (1e-4, 1e-3, 1e-2)]
    assert values[0] > values[1] > values[2]


def test_lsd_identity_scale_and_symmetry():
    rng = np.random.default_rng(1)
    x = rng.normal(size=8000)
    y = rng.normal(size=8000)
    assert lsd(x, x) == 0
    assert lsd(x, 2 * x) == pytest.approx(20 * math.log10(2), abs=1e-9)
    assert lsd(x, y) == pytest.approx(lsd(y, x), rel=1e-12)
    assert lsd(x, y) > 0


def test_lsd_length_mismatch():
    with pytest.raises(ValueError):
        lsd(np.ones(10), np.ones(11))


def test_compression_ratio_basics():
    assert compression_ratio(1000, 1000) == 1.0
    assert compression_ratio(1000, 250) == 2 * compression_ratio(1000, 500)
    with pytest.raises(ValueError):
        compression_ratio(0, 10)


def test_compression_ratio_for_smallest_default_net():
    # 10 s of 22050 Hz PCM16 against a quantized 2x64 + 1x32 model file
    source = source_bytes(220500)
    assert source == 441_000
    cfg = NetConfig(PeConfig(16), (64, 64), (32,))
    compressed = file_size(cfg, quantized=True)
    # header 54 + (2 + 2*2) + (2 + 2*1) = 64; tensor headers 6 weights * 14 + 6 biases * 10 = 144;
    # int8 payload (33*64+64) + (64*64+64) + 2*(64*32+32 + 32+1) = 10562
    assert compressed == 64 + 144 + 10_562
    assert compression_ratio(source, compressed) == pytest.approx(441_000 / 10_770)


def test_add_noise_zero_variance_is_identity():
    x = AudioClip(sine().astype(np.float32), 8000)
    np.testing.assert_array_equal(add_noise(x, 0.0).samples, x.samples)


def test_add_noise_variance_and_determinism():
    x = AudioClip(np.zeros(220500, np.float32), 22050)
    a = add_noise(x, 1e-3, seed=7).samples
    assert np.var(a) == pytest.approx(1e-3, rel=0.05)
    np.testing.assert_array_equal(a, add_noise(x, 1e-3, seed=7).samples)
    assert not np.array_equal(a, add_noise(x, 1e-3, seed=8).samples)


def test_add_noise_rejects_negative():
    with pytest.raises(ValueError):
        add_noise(AudioClip(np.zeros(3), 8000), -1)


def test_eval_result_formats():
    r = EvalResult(1e-3, EXACT_MATCH, 0.0)
    assert r.to_text() == "mse=1.000000e-03 snr_db=inf lsd=0.0000"
    assert json.loads(r.to_json()) == {"mse": 1e-3, "snr_db": "inf", "lsd": 0.0}


def test_evaluate_noise_is_detected():
    x = sine()
    y = add_noise(AudioClip(x, 8000), 1e-3).samples
    r = evaluate(x, y, compression=4.0)
    assert r.lsd > 0 and math.isfinite(r.snr_db)
    assert r.compression_ratio == 4.0
