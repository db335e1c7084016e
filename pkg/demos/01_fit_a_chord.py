"""
Fitting a chord with a Siamese SIREN
====================================

A waveform is treated as a function of time and a small sine-activated
network is overfitted to it. Both heads learn the same signal from
different initializations.
"""

# %%
import numpy as np

from siamese_siren import AudioClip, NetConfig, PeConfig, TrainConfig, forward, param_count, train
from siamese_siren.encoding import encode_grid
from siamese_siren.metrics import snr

rate = 8000
t = np.arange(rate // 4) / rate
chord = 0.5 * np.sin(2 * np.pi * 220 * t) + 0.3 * np.sin(2 * np.pi * 330 * t)
clip = AudioClip(chord.astype(np.float32), rate)

# %%
# A trunk of two 32-wide layers feeds two 16-wide heads.
cfg = NetConfig(PeConfig(L=10), shared=(32, 32), siamese=(16,))
print("parameters:", param_count(cfg), "samples:", len(chord))

# %%
def progress(i, loss):
    if i % 100 == 0:
        print(f"iter {i:4d} loss {loss:.3e}")


params, report = train(clip, cfg, TrainConfig(iterations=400, learning_rate=1e-3), callback=progress)
print(f"final loss {report.final_loss:.3e} in {report.duration:.1f} s")

# %%
f0, f1 = forward(params, cfg, encode_grid(len(chord), cfg.pe))
print(f"head 0 SNR {snr(chord, f0):.1f} dB, head 1 SNR {snr(chord, f1):.1f} dB")
