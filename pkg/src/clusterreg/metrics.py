"""Registration quality metrics and synthetic experiment generators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PointSet
from .errors import DimensionMismatch, EmptyCorrespondence
from .kernels import sqeuclid_cdist

GROUND_TRUTH = "ground_truth"
NEAREST_NEIGHBOR = "nearest_neighbor"

_NN_CHUNK = 512


@dataclass(frozen=True)
class Correspondence:
    """Point pairs (deformed index, target index) plus how they were obtained."""

    pairs: np.ndarray  # (K, 2) int
    mode: str = GROUND_TRUTH

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "pairs", pairs)


def identity_pairs(count: int) -> Correspondence:
    idx = np.arange(count, dtype=np.int64)
    return Correspondence(np.stack([idx, idx], axis=1), mode=GROUND_TRUTH)


def nearest_neighbor_pairs(deformed: PointSet, target: PointSet) -> Correspondence:
    """Exact Euclidean nearest target for each deformed point (ties: lowest index)."""
    if deformed.dim != target.dim:
        raise DimensionMismatch("deformed/target dimensions differ")
    A = deformed.points
    B = target.points
    nn = np.empty(A.shape[0], dtype=np.int64)
    for start in range(0, A.shape[0], _NN_CHUNK):
        stop = min(start + _NN_CHUNK, A.shape[0])
        nn[start:stop] = sqeuclid_cdist(A[start:stop], B).argmin(axis=1)
    idx = np.arange(A.shape[0], dtype=np.int64)
    return Correspondence(np.stack([idx, nn], axis=1), mode=NEAREST_NEIGHBOR)


def rmse(deformed: PointSet, target: PointSet, corr: Correspondence) -> float:
    """Root mean squared distance over corresponding pairs."""
    if corr.pairs.shape[0] == 0:
        raise EmptyCorrespondence("no pairs to evaluate")
    if deformed.dim != target.dim:
        raise DimensionMismatch("deformed/target dimensions differ")
    d = deformed.points[corr.pairs[:, 0]] - target.points[corr.pairs[:, 1]]
    return float(np.sqrt(np.mean(np.sum(d * d, axis=1))))


def add_noise(ps: PointSet, sigma: float, seed: int = 0) -> PointSet:
    """Perturb every coordinate with zero-mean Gaussian noise of std sigma."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return PointSet(ps.points, norm=ps.norm)
    rng = np.random.default_rng(seed)
    return PointSet(ps.points + rng.normal(0.0, sigma, size=ps.points.shape))


def occlude(ps: PointSet, fraction: float, seed: int = 0) -> PointSet:
    """Remove round(fraction * P) uniformly chosen points, keeping order."""
    if not 0 <= fraction < 1:
        raise ValueError(f"fraction must lie in [0, 1), got {fraction}")
    P = len(ps)
    k = round(fraction * P)
    if k == 0:
        return PointSet(ps.points, norm=ps.norm)
    rng = np.random.default_rng(seed)
    drop = rng.choice(P, size=k, replace=False)
    keep = np.setdiff1d(np.arange(P), drop)
    return PointSet(ps.points[keep])


def synthetic_warp(
    ps: PointSet,
    magnitude: float,
    bandwidth: float = 1.5,
    seed: int = 0,
    bumps: int = 5,
) -> tuple[PointSet, Correspondence]:
    """Displace points by a smooth random field of Gaussian source/sink bumps.

    Each bump pushes points away from (or toward) its center with Gaussian
    falloff, i.e. the field is a gradient of random RBF potentials; such
    curl-free fields avoid near-rotational warps that no correspondence-free
    method could identify on symmetric shapes.  Bump centers are drawn from
    the inner half of the bounding box.  The field is rescaled so the maximum
    point displacement equals ``magnitude`` exactly.  Ground truth is the
    index-identity pairing.
    """
    if magnitude < 0:
        raise ValueError("magnitude must be >= 0")
    pts = ps.points
    pairs = identity_pairs(len(ps))
    if magnitude == 0:
        return PointSet(pts, norm=ps.norm), pairs
    rng = np.random.default_rng(seed)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    mid = (lo + hi) / 2.0
    half = (hi - lo) / 2.0
    centers = rng.uniform(mid - 0.5 * half, mid + 0.5 * half, size=(bumps, ps.dim))
    amplitudes = rng.normal(size=bumps)
    weights = np.exp(-sqeuclid_cdist(pts, centers) / (2.0 * bandwidth**2))
    disp = np.zeros_like(pts)
    for k in range(bumps):
        disp += amplitudes[k] * weights[:, [k]] * (pts - centers[k])
    peak = float(np.sqrt(np.sum(disp * disp, axis=1)).max())
    if peak > 0:
        disp *= magnitude / peak
    return PointSet(pts + disp), pairs
