"""Dimension-independent neighborhood filtering on the decreasing rearrangement.

The library groups an image into its distinct intensity levels, filters the
resulting 1-D step function with iterated kernel averages (cost Q^2 per step
for Q levels, independent of pixel count), and maps the converged values
back through the level sets — yielding denoising and histogram-based
segmentation in any dimension.  Pixel-domain reference filters (direct
neighborhood filter, bilateral, nonlocal means) ship alongside for
validation and comparison.
"""

from .filter1d import (
    FilterConfig,
    FilterTrace,
    expansion_residual,
    functional_j,
    iterate,
    nf_step,
)
from .kernels import (
    GaussianProfile,
    Kernel,
    PowerDecayProfile,
    check_decay_condition,
    eval_scaled,
    g_primitive,
    make_kernel,
)
from .noise_metrics import NoiseSpec, add_gaussian_noise, rmse, snr_measure
from .pgm import PgmError, quantize, read_pgm, write_pgm
from .rearrangement import (
    Image,
    LevelStructure,
    Rearrangement,
    decreasing_rearrangement,
    distribution_function,
    histogram,
    reconstruct,
)
from .reference_filters import SpatialConfig, bilateral, direct_nf, nlm
from .segmentation import (
    Segmentation,
    dice,
    inflexion_points,
    segment,
    segment_with_trace,
)

__version__ = "0.1.0"

__all__ = [
    "FilterConfig", "FilterTrace", "GaussianProfile", "Image", "Kernel",
    "LevelStructure", "NoiseSpec", "PgmError", "PowerDecayProfile",
    "Rearrangement", "Segmentation", "SpatialConfig", "add_gaussian_noise",
    "bilateral", "check_decay_condition", "decreasing_rearrangement", "dice",
    "direct_nf", "distribution_function", "eval_scaled", "expansion_residual",
    "functional_j", "g_primitive", "histogram", "inflexion_points", "iterate",
    "make_kernel", "nf_step", "nlm", "quantize", "read_pgm", "reconstruct",
    "rmse", "segment", "segment_with_trace", "snr_measure", "write_pgm",
]
