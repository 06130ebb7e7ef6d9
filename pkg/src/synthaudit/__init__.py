"""Empirical privacy-loss auditing for synthetic datasets.

Estimates the expected privacy loss of a synthetic dataset relative to the
real data it was generated from: adjacent datasets are simulated by removing
nearest artificial neighbours of sampled real points, the loss of each pair is
estimated with a nearest-neighbour KL divergence estimator, and the sample is
aggregated into a (mu, gamma) tail bound via Chebyshev's inequality with
semi-variances. Ships with Gaussian-mechanism utilities, desk-scale synthetic
generators, and a model-inversion attack harness for validating the estimates.
"""

from .adjacency import AdjacentPair, AuditConfig, KlSample, choose_k, remove_neighbors, sample_losses, similarity
from .bounds import PrivacyEstimate, chebyshev_gamma, chebyshev_mu, moments
from .datamodel import Dataset, MechanismParams, load_csv, save_csv, validate_pair
from .divergence import DegenerateSamplesError, KlEstimate, kl_estimate, kl_symmetric_max
from .inversion import AttackResult, MlpModel, invert, reconstruction_quality, train_mlp
from .mechanism import calibrate_sigma, clip_norm, dp_layer
from .neighbors import NeighborHit, NeighborIndex, brute_nearest, build_index, nearest
from .synthgen import GeneratorSpec, generate

__version__ = "0.1.0"

__all__ = [
    "AdjacentPair",
    "AttackResult",
    "AuditConfig",
    "Dataset",
    "DegenerateSamplesError",
    "GeneratorSpec",
    "KlEstimate",
    "KlSample",
    "MechanismParams",
    "MlpModel",
    "NeighborHit",
    "NeighborIndex",
    "PrivacyEstimate",
    "brute_nearest",
    "build_index",
    "calibrate_sigma",
    "chebyshev_gamma",
    "chebyshev_mu",
    "choose_k",
    "clip_norm",
    "dp_layer",
    "generate",
    "invert",
    "kl_estimate",
    "kl_symmetric_max",
    "load_csv",
    "moments",
    "nearest",
    "reconstruction_quality",
    "remove_neighbors",
    "sample_losses",
    "save_csv",
    "similarity",
    "train_mlp",
    "validate_pair",
]
