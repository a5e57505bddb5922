"""Correspondence-free non-rigid point set registration.

Source points act as fuzzy clustering centroids and target points as members;
a Laplacian-kernel displacement field with a clustering-improved low-rank
Gram approximation deforms the source onto the target with closed-form
per-iteration updates.
"""

from .core import (
    NormalizationTransform,
    PointSet,
    RegistrationConfig,
    RegistrationResult,
    denormalize,
    normalize,
)
from .clustering import KMeansResult, kmeans_elkan, kmeans_lloyd_reference
from .kernels import KernelSpec, cross_gram, gram_matrix, kernel_eval
from .lowrank import BoundReport, NystromFactor, audit_bound, build_nystrom, regularized_solve
from .metrics import (
    Correspondence,
    add_noise,
    identity_pairs,
    nearest_neighbor_pairs,
    occlude,
    rmse,
    synthetic_warp,
)
from .pointio import read_points, write_points
from .solver import register

__version__ = "0.1.0"

__all__ = [
    "NormalizationTransform",
    "PointSet",
    "RegistrationConfig",
    "RegistrationResult",
    "KMeansResult",
    "KernelSpec",
    "NystromFactor",
    "BoundReport",
    "Correspondence",
    "normalize",
    "denormalize",
    "kernel_eval",
    "gram_matrix",
    "cross_gram",
    "kmeans_elkan",
    "kmeans_lloyd_reference",
    "build_nystrom",
    "regularized_solve",
    "audit_bound",
    "rmse",
    "identity_pairs",
    "nearest_neighbor_pairs",
    "add_noise",
    "occlude",
    "synthetic_warp",
    "read_points",
    "write_points",
    "register",
]
