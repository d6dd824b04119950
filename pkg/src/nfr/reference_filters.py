"""Pixel-domain filters: direct neighborhood filter, bilateral, nonlocal means.

`direct_nf` is the correctness oracle for the 1-D engine: it averages over
ALL pixels (fully nonlocal, no spatial window), evaluating the kernel once
per (pixel, distinct level) pair — N*Q evaluations per iteration, against
the engine's Q^2.  Bilateral and NLM are the spatially-windowed comparison
baselines, each applied once by default.

All three clamp outputs to the input range (convex combinations can
overshoot by ulps) and so map constant images to themselves exactly.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .filter1d import _guard_step_values
from .kernels import Kernel, eval_scaled
from .rearrangement import Image

_CHUNK = 8192  # pixel rows per kernel-matrix block, keeps memory bounded


@dataclass
class SpatialConfig:
    """Spatial parameters for the windowed filters.

    rho is the spatial Gaussian scale (bilateral) or the patch Gaussian
    standard deviation (NLM).  window_radius None picks the per-filter
    default: ceil(3*rho) for bilateral, 10 for NLM.
    """

    rho: float
    patch_radius: int = 0
    window_radius: int | None = None

    def __post_init__(self):
        if not self.rho > 0.0:
            raise ValueError("rho must be positive")
        if int(self.patch_radius) < 0:
            raise ValueError("patch_radius must be >= 0")
        self.patch_radius = int(self.patch_radius)
        if self.window_radius is not None:
            if int(self.window_radius) < 1:
                raise ValueError("window_radius must be >= 1")
            self.window_radius = int(self.window_radius)


def default_workers() -> int:
    """Worker cap from the NFR_THREADS environment variable (default 1)."""
    raw = os.environ.get("NFR_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"NFR_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ValueError("NFR_THREADS must be >= 1")
    return n


def _nf_pixel_pass(um, vals, level_sums, level_counts, k, workers):
    """Per-pixel kernel averages against the grouped levels of um.

    um: weight-source pixel values (length N); vals: its distinct values,
    descending; level_sums/level_counts: per-level sums of the current
    values and pixel counts.  Returns the raw per-pixel outputs.
    """
    n = um.size
    out = np.empty(n)

    def run(lo, hi):
        kblk = eval_scaled(k, um[lo:hi, None] - vals[None, :])
        out[lo:hi] = (kblk @ level_sums) / (kblk @ level_counts)

    spans = [(lo, min(lo + _CHUNK, n)) for lo in range(0, n, _CHUNK)]
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda s: run(*s), spans))
    else:
        for span in spans:
            run(*span)
    return out


def direct_nf(img: Image, k: Kernel, iterations: int, scheme: str = "varying",
              workers: int | None = None) -> Image:
    """Iterated pixel-domain neighborhood filter over all pixels.

    scheme "varying" reads the weights from the current iterate, "fixed"
    from the input image.  Pixels sharing a weight value receive one common
    output value (their rows are identical sums), taken from their first
    occurrence so ties stay ties bit-for-bit; the shared per-level outputs
    then get the same range/ordering guard as the 1-D engine.
    """
    if int(iterations) < 0:
        raise ValueError("iterations must be >= 0")
    if scheme not in ("varying", "fixed"):
        raise ValueError(f"unknown scheme {scheme!r}")
    if workers is None:
        workers = default_workers()
    u0 = img.data
    un = u0.copy()
    for _ in range(int(iterations)):
        um = u0 if scheme == "fixed" else un
        vals_asc, first, inverse, counts = np.unique(
            um, return_index=True, return_inverse=True, return_counts=True
        )
        inverse = inverse.ravel()
        sums_asc = np.bincount(inverse, weights=un, minlength=vals_asc.size)
        # descending level order, matching the 1-D engine's orientation
        vals = vals_asc[::-1].copy()
        level_sums = sums_asc[::-1].copy()
        level_counts = counts[::-1].astype(np.float64)
        out = _nf_pixel_pass(um, vals, level_sums, level_counts, k, workers)
        per_level = out[first[::-1]]
        per_level = _guard_step_values(per_level, un)
        un = per_level[(vals_asc.size - 1) - inverse]
    return Image(un, img.shape)


def bilateral(img: Image, k: Kernel, sp: SpatialConfig, iterations: int = 1) -> Image:
    """Bilateral filter: intensity kernel times spatial Gaussian exp(-d^2/rho^2).

    The spatial term is truncated at window_radius (default ceil(3*rho));
    normalization runs over the in-bounds truncated window.
    """
    if len(img.shape) != 2:
        raise ValueError("bilateral filter requires a 2-D image")
    wr = sp.window_radius if sp.window_radius is not None else math.ceil(3.0 * sp.rho)
    u = img.to_array()
    h_, w_ = u.shape
    lo, hi = float(u.min()), float(u.max())
    for _ in range(int(iterations)):
        num = np.zeros_like(u)
        den = np.zeros_like(u)
        for dy in range(-wr, wr + 1):
            ys0, ys1 = max(0, -dy), min(h_, h_ - dy)
            for dx in range(-wr, wr + 1):
                xs0, xs1 = max(0, -dx), min(w_, w_ - dx)
                if ys0 >= ys1 or xs0 >= xs1:
                    continue
                c = u[ys0:ys1, xs0:xs1]
                s = u[ys0 + dy:ys1 + dy, xs0 + dx:xs1 + dx]
                wgt = math.exp(-(dy * dy + dx * dx) / (sp.rho * sp.rho)) \
                    * eval_scaled(k, c - s)
                num[ys0:ys1, xs0:xs1] += wgt * s
                den[ys0:ys1, xs0:xs1] += wgt
        u = np.clip(num / den, lo, hi)
    return Image(u.ravel(), img.shape)


def nlm(img: Image, k: Kernel, sp: SpatialConfig, iterations: int = 1) -> Image:
    """Nonlocal means: weights from Gaussian-weighted patch distances.

    The patch distance at offset d is sum_tau G(tau) (u(x+tau) - u(x+d+tau))^2
    with G a std-rho Gaussian truncated to the patch and normalized to sum 1
    (so patch_radius 0 degenerates to the plain squared difference and the
    filter reduces to one direct-NF step on a full window).  Patches read
    symmetric (mirror) boundary extension; search offsets are restricted to
    in-bounds pixels, window_radius default 10.  Weight = K_h(sqrt(distance)),
    i.e. exp(-d^2/h^2) for the Gaussian kernel.
    """
    if len(img.shape) != 2:
        raise ValueError("nonlocal means requires a 2-D image")
    pr = sp.patch_radius
    wr = sp.window_radius if sp.window_radius is not None else 10
    u = img.to_array()
    h_, w_ = u.shape
    lo, hi = float(u.min()), float(u.max())

    ax = np.arange(-pr, pr + 1, dtype=np.float64)
    gk = np.exp(-(ax[:, None] ** 2 + ax[None, :] ** 2) / (2.0 * sp.rho * sp.rho))
    gk /= gk.sum()

    for _ in range(int(iterations)):
        pad = np.pad(u, pr, mode="symmetric")
        num = np.zeros_like(u)
        den = np.zeros_like(u)
        for dy in range(-wr, wr + 1):
            ys0, ys1 = max(0, -dy), min(h_, h_ - dy)
            if ys0 >= ys1:
                continue
            for dx in range(-wr, wr + 1):
                xs0, xs1 = max(0, -dx), min(w_, w_ - dx)
                if xs0 >= xs1:
                    continue
                ny, nx = ys1 - ys0, xs1 - xs0
                # squared differences on the patch-extended overlap box
                c = pad[ys0:ys1 + 2 * pr, xs0:xs1 + 2 * pr]
                s = pad[ys0 + dy:ys1 + dy + 2 * pr, xs0 + dx:xs1 + dx + 2 * pr]
                d2 = (c - s) ** 2
                dist = np.zeros((ny, nx))
                for a in range(2 * pr + 1):
                    for b in range(2 * pr + 1):
                        dist += gk[a, b] * d2[a:a + ny, b:b + nx]
                wgt = eval_scaled(k, np.sqrt(dist))
                sval = u[ys0 + dy:ys1 + dy, xs0 + dx:xs1 + dx]
                num[ys0:ys1, xs0:xs1] += wgt * sval
                den[ys0:ys1, xs0:xs1] += wgt
        u = np.clip(num / den, lo, hi)
    return Image(u.ravel(), img.shape)
