"""Gaussian mechanism utilities: noise calibration and the clip-then-noise layer."""

from __future__ import annotations

import math

import numpy as np

from .datamodel import _as_vector


def calibrate_sigma(epsilon: float, delta: float, clip: float) -> float:
    """Boundary noise scale clip * sqrt(2 ln(1.25/delta)) / epsilon.

    The (epsilon, delta) guarantee requires a strictly larger sigma, so treat
    the returned value as an infimum.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if not clip > 0:
        raise ValueError(f"clip must be positive, got {clip}")
    return clip * math.sqrt(2.0 * math.log(1.25 / delta)) / epsilon


def clip_norm(a, clip: float) -> np.ndarray:
    """Scale ``a`` down to L2 norm ``clip`` if it exceeds it; direction preserved."""
    if not clip > 0:
        raise ValueError(f"clip must be positive, got {clip}")
    v = _as_vector(a, "input")
    norm = float(np.linalg.norm(v))
    if norm <= clip:
        return v
    out = v * (clip / norm)
    # rounding can leave the norm a few ulps above the bound; renormalise
    norm = float(np.linalg.norm(out))
    while norm > clip:
        out = out * (clip / norm)
        norm = float(np.linalg.norm(out))
    return out


def dp_layer(a, clip: float, sigma: float, rng) -> np.ndarray:
    """Clip the L2 norm of ``a`` and add i.i.d. N(0, sigma^2) per coordinate.

    ``rng`` is a seed or numpy Generator; output is deterministic given it.
    """
    if not sigma >= 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    clipped = clip_norm(a, clip)
    rng = np.random.default_rng(rng)
    return clipped + rng.normal(0.0, 1.0, size=clipped.shape) * sigma


def dp_layer_samples(a, clip: float, sigma: float, rng, count: int) -> np.ndarray:
    """``count`` independent dp_layer outputs for one input, as a (count, dim) array.

    Monte-Carlo harness for checking the mechanism's output distribution; the
    first row equals dp_layer on a generator in the same state.
    """
    if not sigma >= 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    clipped = clip_norm(a, clip)
    rng = np.random.default_rng(rng)
    return clipped + rng.normal(0.0, 1.0, size=(count, clipped.shape[0])) * sigma
