"""Core data model: point sets, normalization, configuration, results."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateInput, DimensionMismatch


@dataclass(frozen=True)
class NormalizationTransform:
    """Record of how a point set was centered and scaled.

    Forward transform: p -> (p - centroid) / scale.
    Inverse transform: p -> p * scale + centroid.
    """

    centroid: np.ndarray
    scale: float

    def __post_init__(self):
        c = np.asarray(self.centroid, dtype=np.float64)
        object.__setattr__(self, "centroid", c)
        if not np.isfinite(c).all():
            raise DegenerateInput("non-finite centroid")
        if not self.scale > 0:
            raise DegenerateInput(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class PointSet:
    """An ordered list of n-dimensional points stored as a (P, n) array.

    Immutable after construction; the backing array is marked read-only.
    """

    points: np.ndarray
    norm: Optional[NormalizationTransform] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2:
            raise DegenerateInput(f"points must be a 2-D array, got ndim={pts.ndim}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DegenerateInput(f"need at least one point of dimension >= 1, got shape {pts.shape}")
        if not np.isfinite(pts).all():
            raise DegenerateInput("points contain NaN or Inf")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class RegistrationConfig:
    """Hyperparameters of the registration loop.

    lam is the entropy-regularization weight, zeta the displacement smoothness
    trade-off, approx_ratio the landmark fraction of the low-rank Gram
    approximation (1.0 selects the exact dense path).
    """

    lam: float = 0.5
    zeta: float = 0.1
    kernel: "KernelSpec" = None  # default filled below to avoid import cycle
    approx_ratio: float = 0.3
    max_iters: int = 100
    tol: float = 1e-5
    seed: int = 0

    def __post_init__(self):
        if self.kernel is None:
            from .kernels import KernelSpec

            object.__setattr__(self, "kernel", KernelSpec())
        if self.lam <= 0 or self.zeta <= 0 or self.tol <= 0:
            raise ValueError("lam, zeta and tol must be strictly positive")
        if not 0 < self.approx_ratio <= 1:
            raise ValueError(f"approx_ratio must lie in (0, 1], got {self.approx_ratio}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class RegistrationResult:
    """Output of :func:`clusterreg.solver.register`."""

    deformed: PointSet
    coefficients: np.ndarray
    sigma2_trace: list = field(default_factory=list)
    objective_trace: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    wall_time: float = 0.0


def normalize(ps: PointSet) -> PointSet:
    """Center a point set at its mean and scale by the RMS radius.

    A single scalar scale is used for all axes so aspect ratio is preserved.
    The applied transform is recorded on the returned set.

    Raises DegenerateInput if the set has fewer than 2 points or all points
    coincide (the scale would be zero).
    """
    pts = ps.points
    if pts.shape[0] < 2:
        raise DegenerateInput("normalization needs at least 2 points")
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    scale = float(np.sqrt(np.mean(np.sum(centered * centered, axis=1))))
    if scale <= 0:
        raise DegenerateInput("all points coincide; scale would be zero")
    return PointSet(centered / scale, norm=NormalizationTransform(centroid, scale))


def denormalize(ps: PointSet, t: NormalizationTransform) -> PointSet:
    """Map a point set back through the inverse of a recorded transform."""
    if ps.dim != t.centroid.shape[0]:
        raise DimensionMismatch(
            f"point dimension {ps.dim} != transform dimension {t.centroid.shape[0]}"
        )
    return PointSet(ps.points * t.scale + t.centroid)
