"""Clustering-improved Nystrom approximation of the kernel Gram matrix.

The Gram matrix over the source points is approximated as E W^-1 E^T where
the landmarks are Elkan k-means centroids of the source (not a random
subset).  Regularized systems (L + diag(d)) c = B are then solved through the
matrix-inversion identity

    (D + E W^-1 E^T)^-1 = D^-1 - D^-1 E (W + E^T D^-1 E)^-1 E^T D^-1

so cost stays O(C C'^2 + C'^3) and memory O(C C').  An audit entry point
computes the exact dense approximation error and the theoretical bound
4*sqrt(2) T^(3/2) gamma sqrt(C' q) + 2 C' gamma^2 T q ||W^-1||_F, which holds
for the Laplacian kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import KMeansResult, kmeans_elkan
from .core import PointSet
from .errors import SingularSystem, UnsupportedKernel
from .kernels import LAPLACIAN, KernelSpec, cross_gram, gram_matrix

# condition-number threshold above which W is inverted via pseudo-inverse
_PINV_COND = 1e12


@dataclass(frozen=True)
class NystromFactor:
    """Low-rank factorization L ~ E W^-1 E^T of a kernel Gram matrix."""

    E: np.ndarray  # (C, C') cross-Gram against the landmarks
    W: np.ndarray  # (C', C') landmark Gram, un-jittered
    landmarks: np.ndarray  # (C', n) k-means centroids
    jitter: float
    kmeans: KMeansResult = None

    @property
    def rank(self) -> int:
        return self.W.shape[0]

    def W_jittered(self) -> np.ndarray:
        return self.W + self.jitter * np.eye(self.W.shape[0])


def landmark_count(ratio: float, C: int) -> int:
    return max(1, min(C, round(ratio * C)))


def build_nystrom(spec: KernelSpec, source, ratio: float, seed: int = 0) -> NystromFactor:
    """Build the landmark factorization for a source point set.

    Landmarks are k-means centroids; the landmark Gram W gets a diagonal
    jitter of 1e-8 * trace(W) / C' before any inversion.
    """
    pts = source.points if isinstance(source, PointSet) else np.asarray(source, dtype=np.float64)
    C = pts.shape[0]
    if not 0 < ratio <= 1:
        raise ValueError(f"ratio must lie in (0, 1], got {ratio}")
    cprime = landmark_count(ratio, C)
    km = kmeans_elkan(pts, cprime, seed=seed)
    E = cross_gram(spec, pts, km.centroids)
    W = gram_matrix(spec, km.centroids)
    jitter = 1e-8 * float(np.trace(W)) / cprime
    return NystromFactor(E=E, W=W, landmarks=km.centroids, jitter=jitter, kmeans=km)


def regularized_solve(gram_or_factor, d: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve (L + diag(d)) c = B for c.

    Dense path when ``gram_or_factor`` is an array; otherwise the low-rank
    identity is applied to the NystromFactor without ever forming a C x C
    matrix.  d must be strictly positive.
    """
    d = np.asarray(d, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if np.any(d <= 0):
        raise ValueError("diagonal shift d must be strictly positive")
    if isinstance(gram_or_factor, np.ndarray):
        A = gram_or_factor + np.diag(d)
        try:
            return np.linalg.solve(A, B)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc
    factor = gram_or_factor
    dinv = 1.0 / d
    E = factor.E
    Ed = E * dinv[:, None]  # D^-1 E, (C, C')
    inner = factor.W_jittered() + E.T @ Ed
    rhs = Ed.T @ B
    try:
        z = np.linalg.solve(inner, rhs)
    except np.linalg.LinAlgError:
        bump = 1e-8 * float(np.trace(inner)) / inner.shape[0]
        try:
            z = np.linalg.solve(inner + bump * np.eye(inner.shape[0]), rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem("inner low-rank system is singular") from exc
    return dinv[:, None] * B - Ed @ z


def apply_factor(factor: NystromFactor, c: np.ndarray) -> np.ndarray:
    """Compute (E W^-1 E^T) c without materializing the approximation."""
    try:
        z = np.linalg.solve(factor.W_jittered(), factor.E.T @ c)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("landmark Gram is singular even after jitter") from exc
    return factor.E @ z


def _w_inverse(W: np.ndarray):
    """Inverse of the un-jittered landmark Gram; pseudo-inverse if ill-conditioned."""
    if np.linalg.cond(W) > _PINV_COND:
        return np.linalg.pinv(W), True
    return np.linalg.inv(W), False


def approximation_error(spec: KernelSpec, source, landmarks) -> float:
    """Exact Frobenius error ||L - E W^-1 E^T||_F, computed densely."""
    pts = source.points if isinstance(source, PointSet) else np.asarray(source, dtype=np.float64)
    Z = np.asarray(landmarks, dtype=np.float64)
    L = gram_matrix(spec, pts)
    E = cross_gram(spec, pts, Z)
    W = gram_matrix(spec, Z)
    Winv, _ = _w_inverse(W)
    return float(np.linalg.norm(L - E @ Winv @ E.T, "fro"))


def random_landmarks(source, count: int, seed: int = 0) -> np.ndarray:
    """Uniform random landmark subset; baseline against clustered landmarks."""
    pts = source.points if isinstance(source, PointSet) else np.asarray(source, dtype=np.float64)
    rng = np.random.default_rng(seed)
    idx = rng.choice(pts.shape[0], size=min(count, pts.shape[0]), replace=False)
    return pts[np.sort(idx)]


@dataclass(frozen=True)
class BoundReport:
    epsilon: float
    bound: float
    ratio: float
    landmark_count: int
    quantization_error: float
    max_cluster_size: int
    used_pinv: bool

    @property
    def slack(self) -> float:
        return self.bound - self.epsilon


def audit_bound(spec: KernelSpec, source, ratio: float, seed: int = 0) -> BoundReport:
    """Exact approximation error versus its theoretical bound (Laplacian only).

    Materializes the dense Gram matrix, so intended for audit scales
    (C <= ~2000).
    """
    if spec.family != LAPLACIAN:
        raise UnsupportedKernel("the approximation bound holds for the Laplacian kernel only")
    pts = source.points if isinstance(source, PointSet) else np.asarray(source, dtype=np.float64)
    C = pts.shape[0]
    cprime = landmark_count(ratio, C)
    km = kmeans_elkan(pts, cprime, seed=seed)
    L = gram_matrix(spec, pts)
    E = cross_gram(spec, pts, km.centroids)
    W = gram_matrix(spec, km.centroids)
    Winv, used_pinv = _w_inverse(W)
    eps = float(np.linalg.norm(L - E @ Winv @ E.T, "fro"))
    q = km.quantization_error
    T = km.max_cluster_size
    gamma = spec.gamma
    bound = 4.0 * np.sqrt(2.0) * T**1.5 * gamma * np.sqrt(cprime * q)
    bound += 2.0 * cprime * gamma**2 * T * q * float(np.linalg.norm(Winv, "fro"))
    return BoundReport(
        epsilon=eps,
        bound=float(bound),
        ratio=ratio,
        landmark_count=cprime,
        quantization_error=q,
        max_cluster_size=T,
        used_pinv=used_pinv,
    )
