"""Nearest-neighbour estimation of KL divergence between two sampled distributions.

Implements the j-th-nearest-neighbour estimator

    value = (d/n) * sum_i ln(nu_j(x_i) / rho_j(x_i)) + ln(m / (n - 1))

where rho_j(x_i) is the distance from x_i to its j-th nearest neighbour within
the P sample (excluding x_i itself) and nu_j(x_i) the distance to its j-th
nearest neighbour within the Q sample. It converges almost surely and needs no
intermediate density estimates. Natural logarithms throughout, so values are
in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datamodel import Dataset, validate_pair
from .neighbors import build_index

ZERO_DISTANCE_FLOOR = 1e-12
MAX_FLOORED_FRACTION = 0.10


class DegenerateSamplesError(ValueError):
    """Raised when duplicate-saturated samples floor too many NN distances."""


@dataclass(frozen=True)
class KlEstimate:
    value: float
    n: int
    m: int
    nn_order: int


def _check_order(n: int, m: int, nn_order: int, has_self: bool) -> None:
    cap = min(n - 1, m - 1 if has_self else m)
    if not 1 <= nn_order <= cap:
        raise ValueError(f"nn_order must lie in [1, {cap}] for sample sizes n={n}, m={m}, got {nn_order}")


def _log_ratio_terms(
    p_samples: Dataset,
    q_samples: Dataset,
    nn_order: int,
    p_to_q: np.ndarray | None,
) -> np.ndarray:
    """Per-point ln(nu_j / rho_j) terms, floored and degeneracy-checked."""
    validate_pair(p_samples, q_samples)
    n, m = len(p_samples), len(q_samples)
    if p_to_q is not None:
        p_to_q = np.asarray(p_to_q, dtype=np.int64)
        if p_to_q.shape != (n,):
            raise ValueError(f"p_to_q must have one entry per P sample, got shape {p_to_q.shape}")
        if p_to_q.max(initial=-1) >= m:
            raise ValueError("p_to_q refers to a Q index out of range")
    has_self = p_to_q is not None and (p_to_q >= 0).any()
    _check_order(n, m, nn_order, has_self)

    p_index = build_index(p_samples)
    q_index = build_index(q_samples)
    self_idx = np.arange(n, dtype=np.int64)
    _, rho_all = p_index.query_batch(p_samples.points, nn_order, exclude_one=self_idx)
    _, nu_all = q_index.query_batch(p_samples.points, nn_order, exclude_one=p_to_q)
    rho = rho_all[:, nn_order - 1]
    nu = nu_all[:, nn_order - 1]

    floored = int(((rho < ZERO_DISTANCE_FLOOR) | (nu < ZERO_DISTANCE_FLOOR)).sum())
    if floored > MAX_FLOORED_FRACTION * n:
        raise DegenerateSamplesError(
            f"{floored} of {n} nearest-neighbour terms had near-zero distances; "
            "samples are duplicate-saturated"
        )
    rho = np.maximum(rho, ZERO_DISTANCE_FLOOR)
    nu = np.maximum(nu, ZERO_DISTANCE_FLOOR)
    return np.log(nu / rho)


def kl_estimate(
    p_samples: Dataset,
    q_samples: Dataset,
    nn_order: int = 1,
    *,
    p_to_q: np.ndarray | None = None,
) -> KlEstimate:
    """Estimate KL(P || Q) in nats from samples of each distribution.

    ``p_to_q``, when given, maps each P row to the Q row holding the very same
    element (-1 where absent); that element is excluded from the nu search.
    Audits of a dataset against a subset of itself need this, because the
    estimator otherwise sees spurious zero distances for every shared point.

    Distances below ``ZERO_DISTANCE_FLOOR`` are floored before the logarithm;
    if more than 10% of terms get floored the input is considered degenerate
    and ``DegenerateSamplesError`` is raised.
    """
    terms = _log_ratio_terms(p_samples, q_samples, nn_order, p_to_q)
    n, m, d = len(p_samples), len(q_samples), p_samples.dim
    value = (d / n) * float(np.sum(terms)) + math.log(m / (n - 1))
    return KlEstimate(value=value, n=n, m=m, nn_order=nn_order)


def kl_estimate_with_se(
    p_samples: Dataset,
    q_samples: Dataset,
    nn_order: int = 1,
) -> tuple[KlEstimate, float]:
    """KL estimate plus the standard error of its per-point log-ratio sum.

    The standard error quantifies the estimator's own sampling noise,
    d * std(terms) / sqrt(n); callers that threshold the estimate (such as the
    neighbour-count heuristic) can use it to ignore values within noise of 0.
    """
    terms = _log_ratio_terms(p_samples, q_samples, nn_order, None)
    n, m, d = len(p_samples), len(q_samples), p_samples.dim
    value = (d / n) * float(np.sum(terms)) + math.log(m / (n - 1))
    se = d * float(np.std(terms)) / math.sqrt(n)
    return KlEstimate(value=value, n=n, m=m, nn_order=nn_order), se


def kl_symmetric_max(
    p_samples: Dataset,
    q_samples: Dataset,
    nn_order: int = 1,
    *,
    p_to_q: np.ndarray | None = None,
    q_to_p: np.ndarray | None = None,
) -> KlEstimate:
    """Conservative two-sided estimate: max of KL(P||Q) and KL(Q||P)."""
    forward = kl_estimate(p_samples, q_samples, nn_order, p_to_q=p_to_q)
    reverse = kl_estimate(q_samples, p_samples, nn_order, p_to_q=q_to_p)
    return KlEstimate(value=max(forward.value, reverse.value), n=forward.n, m=forward.m, nn_order=nn_order)
