"""Tail bounds on expected privacy loss via Chebyshev's inequality with semi-variances.

For a loss sample with mean E[x], variance s2 and upper semi-variance s2_plus
(the variance mass strictly above the mean),

    Pr(x >= E[x] + k*s) <= (1/k^2) * (s2_plus / s2),

so fixing the right-hand side to gamma and solving gives the threshold
mu = E[x] + s_plus / sqrt(gamma); the full standard deviation cancels.
Moments are population (1/N) moments: the inequality is applied as stated for
distribution moments, and ``n_samples`` is recorded so users can judge the
estimation error themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PrivacyEstimate:
    """Aggregated audit result: loss moments, the (mu, gamma) bound, and provenance.

    Provenance fields are None when the estimate was computed directly from a
    bare sample sequence; the audit pipeline fills them in.
    """

    mean_loss: float
    variance: float
    upper_semivariance: float
    mu: float
    gamma: float
    n_samples: int
    k_removed: int | None = None
    direction: str | None = None
    nn_order: int | None = None
    seed: int | None = None


def moments(samples) -> tuple[float, float, float]:
    """Population mean, variance, and upper semi-variance of a sample sequence.

    Points exactly at the mean contribute nothing either way and are excluded
    from the upper semi-variance, matching the integral's open lower limit.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ValueError(f"need at least 2 samples, got {x.shape}")
    if not np.isfinite(x).all():
        raise ValueError("samples contain non-finite values")
    mean = float(x.mean())
    dev = x - mean
    terms = dev * dev
    variance = float(terms.mean())
    upper = float(np.where(dev > 0, terms, 0.0).mean())
    return mean, variance, upper


def chebyshev_mu(samples, gamma: float) -> PrivacyEstimate:
    """Smallest threshold mu with Pr(loss >= mu) bounded by gamma."""
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    mean, variance, upper = moments(samples)
    mu = mean if upper == 0 else mean + math.sqrt(upper) / math.sqrt(gamma)
    return PrivacyEstimate(
        mean_loss=mean,
        variance=variance,
        upper_semivariance=upper,
        mu=mu,
        gamma=gamma,
        n_samples=len(np.asarray(samples)),
    )


def chebyshev_gamma(samples, mu: float) -> float:
    """Bound on the probability that the loss exceeds a given threshold mu."""
    mean, _, upper = moments(samples)
    if not mu > mean:
        raise ValueError(f"mu must exceed the sample mean {mean}, got {mu}")
    return min(1.0, upper / (mu - mean) ** 2)
