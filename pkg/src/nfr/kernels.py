"""Kernel profiles, their scaled forms K_h(xi) = K(xi/h), and validity checks.

Two profiles ship: the Gaussian K(s) = exp(-s^2) and the power-decay family
K(s) = 1/(1 + |s|^p) with p > 1.  Any object with the same interface
(callable plus an analytic `derivative`) is accepted by the engine, but the
order-preservation guarantees of the filter hold only for kernels passing
the symmetric-decay check below; of the built-ins, only the Gaussian does.

Kernel evaluations on the filtering path go through `eval_scaled`, which
maintains a per-kernel counter used by the complexity benchmarks.
"""

from __future__ import annotations

import threading

import numpy as np
from scipy.integrate import quad


class GaussianProfile:
    """K(s) = exp(-s^2)."""

    name = "gaussian"

    def __call__(self, s):
        s = np.asarray(s, dtype=np.float64)
        return np.exp(-(s * s))

    def derivative(self, s):
        s = np.asarray(s, dtype=np.float64)
        return -2.0 * s * np.exp(-(s * s))


class PowerDecayProfile:
    """K(s) = 1/(1 + |s|^p), p > 1.

    Decays too slowly to be log-concave far from the origin, so it fails the
    symmetric-decay condition (see `check_decay_condition`); kept as the
    contrast case for the built-in Gaussian.
    """

    name = "power"

    def __init__(self, p: float = 2.0):
        p = float(p)
        if p <= 1.0:
            raise ValueError("power-decay exponent must satisfy p > 1")
        self.p = p

    def __call__(self, s):
        s = np.asarray(s, dtype=np.float64)
        return 1.0 / (1.0 + np.abs(s) ** self.p)

    def derivative(self, s):
        s = np.asarray(s, dtype=np.float64)
        a = np.abs(s) ** (self.p - 1.0)
        return -self.p * a * np.sign(s) / (1.0 + np.abs(s) ** self.p) ** 2


class Kernel:
    """A profile together with its scale h.

    `evaluations` counts scalar evaluations made through `eval_scaled`; the
    counter is lock-protected so concurrent filtering keeps it exact.
    Diagnostic paths (decay checks, the primitive) do not count.
    """

    def __init__(self, profile, h: float):
        h = float(h)
        if h <= 0.0:
            raise ValueError("kernel scale h must be positive")
        k0 = float(np.asarray(profile(0.0)))
        if not k0 > 0.0:
            raise ValueError("kernel profile must be positive at 0")
        self.profile = profile
        self.h = h
        self.evaluations = 0
        self._lock = threading.Lock()

    def add_evaluations(self, n: int):
        with self._lock:
            self.evaluations += int(n)

    def reset_evaluations(self):
        with self._lock:
            self.evaluations = 0

    def __repr__(self):
        name = getattr(self.profile, "name", type(self.profile).__name__)
        return f"Kernel({name}, h={self.h})"


def make_kernel(name: str, h: float, p: float = 2.0) -> Kernel:
    """Build a kernel by profile name ('gaussian' or 'power')."""
    if name == "gaussian":
        return Kernel(GaussianProfile(), h)
    if name == "power":
        return Kernel(PowerDecayProfile(p), h)
    raise ValueError(f"unknown kernel profile {name!r}")


def eval_scaled(k: Kernel, xi):
    """K_h(xi) = K(xi/h), counting evaluations."""
    xi = np.asarray(xi, dtype=np.float64)
    k.add_evaluations(xi.size)
    return k.profile(xi / k.h)


def g_primitive(k: Kernel, s):
    """Primitive g(s) = integral of K_h(sqrt(t)) dt over [0, s], s >= 0.

    Gaussian kernels have the closed form h^2 (1 - exp(-s / h^2)); anything
    else falls back to adaptive quadrature with absolute tolerance 1e-10.
    g is non-decreasing with g(0) = 0 and g(s) <= s * K(0).
    """
    scalar = np.isscalar(s) or np.ndim(s) == 0
    s_arr = np.asarray(s, dtype=np.float64)
    if np.any(s_arr < 0.0):
        raise ValueError("g_primitive argument must be nonnegative")
    h = k.h
    if isinstance(k.profile, GaussianProfile):
        out = -(h * h) * np.expm1(-s_arr / (h * h))
    else:
        def integrand(t):
            return float(np.asarray(k.profile(np.sqrt(t) / h)))

        flat = s_arr.ravel()
        out = np.empty_like(flat)
        for i, si in enumerate(flat):
            if si == 0.0:
                out[i] = 0.0
            else:
                out[i] = quad(integrand, 0.0, si, epsabs=1e-10, limit=200)[0]
        out = out.reshape(s_arr.shape)
    return float(out) if scalar else out


def check_decay_condition(k: Kernel, samples: int = 100_000, seed: int = 0) -> bool:
    """Monte-Carlo check of the symmetric-decay condition.

    Draws (xi, xi1, xi2) uniformly from [-4h, 4h]^3 and verifies

        R1 = (xi1 - xi2) * (K_h'(xi - xi1) K_h(xi - xi2)
                            - K_h'(xi - xi2) K_h(xi - xi1)) >= 0

    on every triple (up to -1e-12 roundoff slack).  R1 >= 0 everywhere is
    equivalent to log-concavity of the profile and is the hypothesis behind
    the filter's order preservation.  Sampling is a proxy for the universal
    quantifier: deterministic under the seed, and cheap.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    h = k.h
    xi, xi1, xi2 = rng.uniform(-4.0 * h, 4.0 * h, size=(3, samples))

    def kv(x):
        return np.asarray(k.profile(x / h), dtype=np.float64)

    def kd(x):
        return np.asarray(k.profile.derivative(x / h), dtype=np.float64) / h

    r1 = (xi1 - xi2) * (kd(xi - xi1) * kv(xi - xi2) - kd(xi - xi2) * kv(xi - xi1))
    return bool(np.all(r1 >= -1e-12))
