"""Synthetic test images with known level structure."""

from __future__ import annotations

import numpy as np

from .rearrangement import Image

SQUARES_VALUES = (255.0, 170.0, 85.0, 0.0)  # quadrants, brightest first


def squares(size: int = 48) -> Image:
    """Four equal-measure constant quadrants at 255, 170, 85, 0.

    Layout: [[255, 170], [85, 0]].  size must be even so the four level sets
    have exactly equal measure.
    """
    if size < 2 or size % 2:
        raise ValueError("size must be even and >= 2")
    half = size // 2
    a = np.empty((size, size))
    a[:half, :half] = SQUARES_VALUES[0]
    a[:half, half:] = SQUARES_VALUES[1]
    a[half:, :half] = SQUARES_VALUES[2]
    a[half:, half:] = SQUARES_VALUES[3]
    return Image.from_array(a)


def squares_masks(size: int = 48) -> list[np.ndarray]:
    """Ground-truth quadrant masks, ordered like SQUARES_VALUES."""
    img = squares(size).to_array()
    return [img == v for v in SQUARES_VALUES]


def gradient(size: int = 48) -> Image:
    """Horizontal ramp quantized to integer intensities in [0, 255]."""
    if size < 2:
        raise ValueError("size must be >= 2")
    col = np.rint(np.linspace(0.0, 255.0, size))
    return Image.from_array(np.tile(col, (size, 1)))


def texture(size: int = 48, cycles: int = 3) -> Image:
    """Quantized product of sinusoids; many levels with uneven masses."""
    if size < 2:
        raise ValueError("size must be >= 2")
    t = np.arange(size) * (2.0 * np.pi * cycles / size)
    a = np.sin(t)[:, None] * np.cos(t)[None, :]
    return Image.from_array(np.rint(127.5 * (1.0 + a)))
