"""Elkan k-means with a plain Lloyd reference implementation.

Elkan's triangle-inequality bounds skip point-centroid distance computations
that provably cannot change an assignment; it is an exact acceleration, so
both entry points produce identical clusterings for identical seeds.  Both
count their explicit point-centroid distance evaluations so the saving can be
audited.

Initialization is k-means++ driven by a seeded numpy Generator.  Ties between
equidistant centroids break toward the lowest centroid index.  Empty clusters
are repaired by moving the empty centroid onto the point currently farthest
from its own centroid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._accel import njit
from .core import PointSet
from .errors import InvalidK
from .kernels import sqeuclid_cdist


@dataclass(frozen=True)
class KMeansResult:
    centroids: np.ndarray  # (k, n)
    assignment: np.ndarray  # (P,) int
    quantization_error: float
    max_cluster_size: int
    iterations: int
    distance_evals: int = 0
    inertia_trace: Optional[list] = None  # per-pass inertia (reference impl only)


def _as_array(pts) -> np.ndarray:
    if isinstance(pts, PointSet):
        return pts.points
    return np.ascontiguousarray(pts, dtype=np.float64)


def _kmeans_pp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded k-means++ initialization (simple variant, no local trials)."""
    P, n = X.shape
    centers = np.empty((k, n))
    centers[0] = X[int(rng.integers(P))]
    closest = ((X - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = int(rng.integers(P))
        else:
            r = rng.random() * total
            idx = min(int(np.searchsorted(np.cumsum(closest), r, side="right")), P - 1)
        centers[j] = X[idx]
        np.minimum(closest, ((X - centers[j]) ** 2).sum(axis=1), out=closest)
    return centers


@njit(cache=True)
def _elkan_run(X, centers_in, max_iters):
    P, n = X.shape
    k = centers_in.shape[0]
    centers = centers_in.copy()
    assign = np.zeros(P, np.int64)
    upper = np.zeros(P)
    lower = np.zeros((P, k))
    ndist = 0

    # initial full assignment, seeding the bounds
    for i in range(P):
        best = 0
        bestd = 0.0
        for j in range(k):
            s = 0.0
            for d in range(n):
                diff = X[i, d] - centers[j, d]
                s += diff * diff
            dist = np.sqrt(s)
            lower[i, j] = dist
            if j == 0 or dist < bestd:
                bestd = dist
                best = j
        ndist += k
        assign[i] = best
        upper[i] = bestd

    it = 0
    while it < max_iters:
        # means of current assignment
        sums = np.zeros((k, n))
        counts = np.zeros(k, np.int64)
        for i in range(P):
            a = assign[i]
            counts[a] += 1
            for d in range(n):
                sums[a, d] += X[i, d]
        newcenters = np.empty((k, n))
        has_empty = False
        for j in range(k):
            if counts[j] > 0:
                for d in range(n):
                    newcenters[j, d] = sums[j, d] / counts[j]
            else:
                has_empty = True
        if has_empty:
            # squared distance of each point to its currently assigned centroid
            down = np.empty(P)
            for i in range(P):
                s = 0.0
                for d in range(n):
                    diff = X[i, d] - centers[assign[i], d]
                    s += diff * diff
                down[i] = s
            ndist += P
            for j in range(k):
                if counts[j] == 0:
                    far = 0
                    fard = down[0]
                    for i in range(1, P):
                        if down[i] > fard:
                            fard = down[i]
                            far = i
                    for d in range(n):
                        newcenters[j, d] = X[far, d]
                    down[far] = -1.0
        delta = np.empty(k)
        for j in range(k):
            s = 0.0
            for d in range(n):
                diff = newcenters[j, d] - centers[j, d]
                s += diff * diff
            delta[j] = np.sqrt(s)
        centers = newcenters
        it += 1
        for i in range(P):
            upper[i] += delta[assign[i]]
            for j in range(k):
                low = lower[i, j] - delta[j]
                lower[i, j] = low if low > 0.0 else 0.0
        if it >= max_iters:
            break

        # inter-centroid distances and half-nearest margins
        cc = np.zeros((k, k))
        for a in range(k):
            for b in range(a + 1, k):
                s = 0.0
                for d in range(n):
                    diff = centers[a, d] - centers[b, d]
                    s += diff * diff
                dist = np.sqrt(s)
                cc[a, b] = dist
                cc[b, a] = dist
        s_half = np.empty(k)
        for a in range(k):
            m = np.inf
            for b in range(k):
                if b != a and cc[a, b] < m:
                    m = cc[a, b]
            s_half[a] = 0.5 * m

        changed = False
        for i in range(P):
            if upper[i] <= s_half[assign[i]]:
                continue
            tight = False
            for j in range(k):
                a = assign[i]
                if j == a:
                    continue
                z = lower[i, j]
                if 0.5 * cc[a, j] > z:
                    z = 0.5 * cc[a, j]
                if upper[i] <= z:
                    continue
                if not tight:
                    s = 0.0
                    for d in range(n):
                        diff = X[i, d] - centers[a, d]
                        s += diff * diff
                    dist = np.sqrt(s)
                    ndist += 1
                    upper[i] = dist
                    lower[i, a] = dist
                    tight = True
                    if upper[i] <= z:
                        continue
                s = 0.0
                for d in range(n):
                    diff = X[i, d] - centers[j, d]
                    s += diff * diff
                dist = np.sqrt(s)
                ndist += 1
                lower[i, j] = dist
                if dist < upper[i] or (dist == upper[i] and j < assign[i]):
                    assign[i] = j
                    upper[i] = dist
                    changed = True
        if not changed:
            break
    return centers, assign, it, ndist


def _update_centers_reference(X, assign, centers, d_own):
    """Means of each cluster with empty-cluster repair (matches _elkan_run)."""
    P, n = X.shape
    k = centers.shape[0]
    sums = np.zeros((k, n))
    np.add.at(sums, assign, X)
    counts = np.bincount(assign, minlength=k)
    newcenters = np.where(counts[:, None] > 0, sums / np.maximum(counts, 1)[:, None], 0.0)
    if (counts == 0).any():
        down = d_own.copy()
        for j in np.flatnonzero(counts == 0):
            far = int(np.argmax(down))
            newcenters[j] = X[far]
            down[far] = -1.0
    return newcenters


def _lloyd_run(X, centers_in, max_iters):
    P = X.shape[0]
    k = centers_in.shape[0]
    centers = centers_in.copy()
    D = sqeuclid_cdist(X, centers)
    ndist = P * k
    assign = D.argmin(axis=1)
    trace = [float(D[np.arange(P), assign].sum())]
    it = 0
    while it < max_iters:
        centers = _update_centers_reference(X, assign, centers, D[np.arange(P), assign])
        it += 1
        if it >= max_iters:
            break
        D = sqeuclid_cdist(X, centers)
        ndist += P * k
        new_assign = D.argmin(axis=1)
        trace.append(float(D[np.arange(P), new_assign].sum()))
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
    return centers, assign, it, ndist, trace


def _finalize(X, centers, assign, iterations, ndist, trace=None) -> KMeansResult:
    diffs = X - centers[assign]
    q = float(np.einsum("ij,ij->", diffs, diffs))
    sizes = np.bincount(assign, minlength=centers.shape[0])
    return KMeansResult(
        centroids=centers,
        assignment=np.asarray(assign, dtype=np.int64),
        quantization_error=q,
        max_cluster_size=int(sizes.max()),
        iterations=int(iterations),
        distance_evals=int(ndist),
        inertia_trace=trace,
    )


def _validate(X, k, max_iters):
    if k < 1 or k > X.shape[0]:
        raise InvalidK(f"k={k} outside [1, {X.shape[0]}]")
    if max_iters < 1:
        raise InvalidK(f"max_iters must be >= 1, got {max_iters}")


def kmeans_elkan(pts, k: int, seed: int = 0, max_iters: int = 100) -> KMeansResult:
    """Triangle-inequality-accelerated k-means (exact, Lloyd-equivalent)."""
    X = _as_array(pts)
    _validate(X, k, max_iters)
    if k == X.shape[0]:
        return _finalize(X, X.copy(), np.arange(k, dtype=np.int64), 0, 0)
    centers0 = _kmeans_pp(X, k, np.random.default_rng(seed))
    centers, assign, it, ndist = _elkan_run(X, centers0, max_iters)
    return _finalize(X, centers, assign, it, ndist)


def kmeans_lloyd_reference(pts, k: int, seed: int = 0, max_iters: int = 100) -> KMeansResult:
    """Plain Lloyd iteration; correctness oracle for kmeans_elkan."""
    X = _as_array(pts)
    _validate(X, k, max_iters)
    if k == X.shape[0]:
        return _finalize(X, X.copy(), np.arange(k, dtype=np.int64), 0, 0, trace=[0.0])
    centers0 = _kmeans_pp(X, k, np.random.default_rng(seed))
    centers, assign, it, ndist, trace = _lloyd_run(X, centers0, max_iters)
    return _finalize(X, centers, assign, it, ndist, trace=trace)
