"""Seeded Gaussian noise with an SNR convention, plus image metrics.

SNR here is sigma(clean) / sigma(noise) with population standard deviations
(ddof 0), so `add_gaussian_noise` draws noise of standard deviation
sigma(img) / snr.  Noise is generated by an explicitly coded Box-Muller
transform over PCG64 uniforms: both pieces are pinned algorithms, so golden
fixtures reproduce bit-for-bit across platforms and numpy versions (numpy's
own `Generator.normal` is ziggurat-based and not part of its stream-
stability promise).  Outputs are not clamped — clamping would distort the
noise statistics; it is available as a presentation option in the CLI.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rearrangement import Image


@dataclass(frozen=True)
class NoiseSpec:
    snr: float
    seed: int

    def __post_init__(self):
        if not self.snr > 0.0:
            raise ValueError("snr must be positive")


def _standard_normal(n: int, seed: int) -> np.ndarray:
    """n standard normal samples: Box-Muller over PCG64 uniforms."""
    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = (n + 1) // 2
    u = rng.random((2, pairs))
    # u in [0,1): use 1-u in (0,1] so the log never sees zero
    r = np.sqrt(-2.0 * np.log1p(-u[0]))
    theta = 2.0 * np.pi * u[1]
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(theta)
    z[1::2] = r * np.sin(theta)
    return z[:n]


def add_gaussian_noise(img: Image, spec: NoiseSpec) -> Image:
    """Add zero-mean Gaussian noise of std sigma(img)/snr, deterministically."""
    sigma = float(np.std(img.data))
    if sigma == 0.0:
        raise ValueError("constant image: SNR-relative noise is undefined")
    noise = (sigma / spec.snr) * _standard_normal(img.n, spec.seed)
    return Image(img.data + noise, img.shape)


def rmse(a: Image, b: Image) -> float:
    """Root-mean-square difference."""
    if a.shape != b.shape:
        raise ValueError(f"shapes differ: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.mean((a.data - b.data) ** 2)))


def snr_measure(clean: Image, noisy: Image) -> float:
    """Empirical SNR: sigma(clean) / sigma(noisy - clean)."""
    if clean.shape != noisy.shape:
        raise ValueError(f"shapes differ: {clean.shape} vs {noisy.shape}")
    return float(np.std(clean.data) / np.std(noisy.data - clean.data))
