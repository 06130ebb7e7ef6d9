"""Adjacency simulation: neighbour removal on the synthetic set and loss sampling.

Instead of re-training a generator with one real example held out, the absence
of a real point is imitated directly on the generated set: the k artificial
points most similar to it are removed, and the expected privacy loss of the
pair (full set, reduced set) is estimated as their KL divergence. Repeating
over randomly drawn real seeds yields the loss sample that the tail bound
aggregates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datamodel import Dataset, _as_vector, validate_pair
from .divergence import kl_estimate, kl_estimate_with_se, kl_symmetric_max

DIRECTIONS = ("forward", "max")
K_CAP_FRACTION = 0.05
NOISE_FLOOR_SIGMAS = 3.0


@dataclass(frozen=True)
class AdjacentPair:
    """Indices removed from the synthetic set to shadow one real example.

    ``seed_real_index`` is -1 when the seed point did not come from an indexed
    real dataset.
    """

    removed_indices: tuple[int, ...]
    seed_real_index: int = -1


@dataclass(frozen=True)
class KlSample:
    pair: AdjacentPair
    loss: float


@dataclass(frozen=True)
class AuditConfig:
    n_pairs: int
    k_override: int | None = None
    nn_order: int = 1
    direction: str = "max"
    seed: int = 42
    gamma: float = 1e-5

    def __post_init__(self):
        if self.n_pairs < 1:
            raise ValueError(f"n_pairs must be positive, got {self.n_pairs}")
        if self.k_override is not None and self.k_override < 1:
            raise ValueError(f"k_override must be positive, got {self.k_override}")
        if self.nn_order < 1:
            raise ValueError(f"nn_order must be positive, got {self.nn_order}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")


def similarity(x, y) -> float:
    """Inverse-distance similarity 1 / (1 + ||x - y||); in (0, 1], 1 iff x == y."""
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.shape[0] != yv.shape[0]:
        raise ValueError(f"dimension mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    diff = xv - yv
    return 1.0 / (1.0 + float(np.sqrt((diff * diff).sum())))


def k_from_divergence(d_hat: float, m: int) -> int:
    """Neighbour count if the whole real-vs-synthetic divergence came from one point.

    Solving ln(m / (m - k)) = d_hat gives k = m (1 - e^(-d_hat)), clamped to
    [1, 5% of m] so the reduced set stays statistically usable.
    """
    if d_hat < 0:
        raise ValueError(f"divergence must be non-negative, got {d_hat}")
    k_max = max(1, round(K_CAP_FRACTION * m))
    raw = round(m * (1.0 - math.exp(-d_hat)))
    return int(min(max(raw, 1), k_max))


def choose_k(real: Dataset, synthetic: Dataset, nn_order: int = 1) -> int:
    """Heuristic k from the estimated real-vs-synthetic KL divergence.

    Only divergence in excess of the estimator's own noise floor (three
    standard errors) is attributed to a point's neighbourhood: at desk-scale
    sample sizes the raw estimate fluctuates by ~0.1 nats around 0 even for a
    perfectly matched generator, and m(1 - e^(-d)) amplifies that noise into
    order-of-magnitude swings of k.
    """
    validate_pair(real, synthetic)
    estimate, se = kl_estimate_with_se(real, synthetic, nn_order)
    d_hat = max(0.0, estimate.value - NOISE_FLOOR_SIGMAS * se)
    return k_from_divergence(d_hat, len(synthetic))


def remove_neighbors(synthetic: Dataset, seed_point, k: int, seed_real_index: int = -1) -> AdjacentPair:
    """The k synthetic indices most similar to ``seed_point``, ties by ascending index."""
    q = _as_vector(seed_point, "seed_point")
    if q.shape[0] != synthetic.dim:
        raise ValueError(f"dimension mismatch: seed point has dim {q.shape[0]}, synthetic has dim {synthetic.dim}")
    m = len(synthetic)
    if not 1 <= k < m:
        raise ValueError(f"k must lie in [1, {m - 1}], got {k}")
    diffs = synthetic.points - q
    sq = (diffs * diffs).sum(axis=1)
    order = np.lexsort((np.arange(m), sq))[:k]
    return AdjacentPair(removed_indices=tuple(sorted(int(i) for i in order)), seed_real_index=seed_real_index)


def _pair_loss(synthetic: Dataset, pair: AdjacentPair, nn_order: int, direction: str) -> float:
    m = len(synthetic)
    removed = np.asarray(pair.removed_indices, dtype=np.int64)
    kept = np.setdiff1d(np.arange(m, dtype=np.int64), removed)
    reduced = synthetic.subset(kept)
    full_to_reduced = np.full(m, -1, dtype=np.int64)
    full_to_reduced[kept] = np.arange(kept.shape[0], dtype=np.int64)
    if direction == "forward":
        return kl_estimate(synthetic, reduced, nn_order, p_to_q=full_to_reduced).value
    return kl_symmetric_max(synthetic, reduced, nn_order, p_to_q=full_to_reduced, q_to_p=kept).value


def sample_losses(real: Dataset, synthetic: Dataset, config: AuditConfig) -> list[KlSample]:
    """Expected-privacy-loss samples over ``config.n_pairs`` adjacent pairs.

    Real seed indices are drawn uniformly without replacement from a generator
    seeded by ``config.seed``; output order is draw order and the whole
    sequence is reproducible from the config.
    """
    validate_pair(real, synthetic)
    if config.n_pairs > len(real):
        raise ValueError(f"n_pairs {config.n_pairs} exceeds the {len(real)} real points available")
    k = config.k_override if config.k_override is not None else choose_k(real, synthetic, config.nn_order)
    if k >= len(synthetic):
        raise ValueError(f"k {k} must be smaller than the synthetic dataset ({len(synthetic)} points)")
    rng = np.random.default_rng(config.seed)
    seeds = rng.choice(len(real), size=config.n_pairs, replace=False)
    samples = []
    for i in seeds:
        pair = remove_neighbors(synthetic, real.points[int(i)], k, seed_real_index=int(i))
        loss = _pair_loss(synthetic, pair, config.nn_order, config.direction)
        samples.append(KlSample(pair=pair, loss=loss))
    return samples
