"""Brute-force reference implementations used only by the tests.

Nothing here imports the production forward pass, loss or FFT path:
weights are read straight out of the parameter containers and everything
else is plain Python loops over floats.
"""

import cmath
import math

MAX_PARAMS = 4096
MAX_SAMPLES = 256


class CapExceeded(ValueError):
    pass


def _check_caps(params, n):
    count = sum(t.size for t in params.tensors())
    if count > MAX_PARAMS:
        raise CapExceeded(f"{count} parameters exceeds oracle cap {MAX_PARAMS}")
    if n > MAX_SAMPLES:
        raise CapExceeded(f"{n} samples exceeds oracle cap {MAX_SAMPLES}")


def _dense(x, w, b):
    fan_in, fan_out = w.shape
    out = []
    for j in range(fan_out):
        acc = float(b[j])
        for i in range(fan_in):
            acc += x[i] * float(w[i, j])
        out.append(acc)
    return out


def oracle_forward_one(params, omega0, omega, x):
    """Both head outputs for one encoded coordinate vector ``x`` (a list of floats)."""
    first = True
    h = list(x)
    for w, b in params.shared:
        om = omega0 if first else omega
        first = False
        h = [math.sin(om * u) for u in _dense(h, w, b)]
    outs = []
    for head in params.heads:
        g = h
        head_first = first
        for k, (w, b) in enumerate(head):
            u = _dense(g, w, b)
            if k == len(head) - 1:
                g = u
            else:
                om = omega0 if head_first else omega
                head_first = False
                g = [math.sin(om * v) for v in u]
        outs.append(g[0])
    if len(outs) == 1:
        outs.append(outs[0])
    return outs[0], outs[1]


def oracle_encode(t, L, sigma):
    vec = [t]
    for k in range(L):
        vec.append(math.sin(sigma**k * math.pi * t))
        vec.append(math.cos(sigma**k * math.pi * t))
    return vec


def oracle_forward(params, cfg, coords):
    """Scalar-loop forward over a batch of coordinate rows."""
    _check_caps(params, len(coords))
    f0, f1 = [], []
    for row in coords:
        a, b = oracle_forward_one(params, cfg.omega0, cfg.omega, [float(v) for v in row])
        f0.append(a)
        f1.append(b)
    return f0, f1


def oracle_loss(params, cfg, coords, targets):
    f0, f1 = oracle_forward(params, cfg, coords)
    n_heads = len(params.heads)
    n = len(targets)
    e0 = sum((a - float(y)) ** 2 for a, y in zip(f0, targets)) / n
    if n_heads == 1:
        return e0
    e1 = sum((a - float(y)) ** 2 for a, y in zip(f1, targets)) / n
    return 0.5 * (e0 + e1)


def oracle_fd_grad(params, cfg, coords, targets, h=1e-4):
    """Central finite differences of :func:`oracle_loss`; returns a list of arrays
    in ``params.tensors()`` order. Perturbs ``params`` in place and restores it."""
    if not 1e-6 <= h <= 1e-3:
        raise ValueError("step h must lie in [1e-6, 1e-3]")
    _check_caps(params, len(coords))
    grads = []
    for t in params.tensors():
        g = t.copy()
        flat = t.reshape(-1)
        gflat = g.reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + h
            plus = oracle_loss(params, cfg, coords, targets)
            flat[idx] = orig - h
            minus = oracle_loss(params, cfg, coords, targets)
            flat[idx] = orig
            gflat[idx] = (plus - minus) / (2 * h)
        grads.append(g)
    return grads


def oracle_dft(samples):
    """Direct O(n^2) DFT returning the non-negative frequency bins."""
    n = len(samples)
    if n > MAX_SAMPLES:
        raise CapExceeded(f"{n} samples exceeds DFT cap {MAX_SAMPLES}")
    bins = []
    for k in range(n // 2 + 1):
        acc = 0j
        for m, x in enumerate(samples):
            acc += float(x) * cmath.exp(-2j * math.pi * k * m / n)
        bins.append(acc)
    return bins
