"""Kernel functions and Gram / cross-Gram matrix construction.

Two kernel families are supported:

* laplacian: K(a, b) = exp(-gamma * ||a - b||_1)
* gaussian:  K(a, b) = exp(-gamma * ||a - b||_2^2)

The gaussian form uses the bandwidth as a plain multiplier so the two
families are directly comparable at equal gamma.

Pairwise distance matrices are the hot kernels here: a numba-compiled loop
implementation is used when available, with a blocked pure-numpy fallback
(selected by CLUSTERREG_DISABLE_NUMBA=1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import HAVE_NUMBA, njit
from .core import PointSet
from .errors import DimensionMismatch

LAPLACIAN = "laplacian"
GAUSSIAN = "gaussian"

# Fallback cdists are evaluated in row blocks of this many points to bound
# the (block, S, n) broadcast temporary.
_BLOCK = 256


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus bandwidth gamma (> 0)."""

    family: str = LAPLACIAN
    gamma: float = 2.0

    def __post_init__(self):
        if self.family not in (LAPLACIAN, GAUSSIAN):
            raise ValueError(f"unknown kernel family {self.family!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")


@njit(cache=True)
def _manhattan_cdist_nb(A, B):  # pragma: no cover - exercised via dispatch
    R = np.empty((A.shape[0], B.shape[0]))
    for i in range(A.shape[0]):
        for j in range(B.shape[0]):
            s = 0.0
            for d in range(A.shape[1]):
                s += abs(A[i, d] - B[j, d])
            R[i, j] = s
    return R


def _manhattan_cdist_np(A, B):
    R = np.empty((A.shape[0], B.shape[0]))
    for start in range(0, A.shape[0], _BLOCK):
        stop = min(start + _BLOCK, A.shape[0])
        R[start:stop] = np.abs(A[start:stop, None, :] - B[None, :, :]).sum(axis=2)
    return R


@njit(cache=True)
def _sqeuclid_cdist_nb(A, B):  # pragma: no cover - exercised via dispatch
    R = np.empty((A.shape[0], B.shape[0]))
    for i in range(A.shape[0]):
        for j in range(B.shape[0]):
            s = 0.0
            for d in range(A.shape[1]):
                diff = A[i, d] - B[j, d]
                s += diff * diff
            R[i, j] = s
    return R


def _sqeuclid_cdist_np(A, B):
    R = np.empty((A.shape[0], B.shape[0]))
    for start in range(0, A.shape[0], _BLOCK):
        stop = min(start + _BLOCK, A.shape[0])
        diff = A[start:stop, None, :] - B[None, :, :]
        R[start:stop] = np.einsum("ijk,ijk->ij", diff, diff)
    return R


manhattan_cdist = _manhattan_cdist_nb if HAVE_NUMBA else _manhattan_cdist_np
sqeuclid_cdist = _sqeuclid_cdist_nb if HAVE_NUMBA else _sqeuclid_cdist_np


def _as_points(x) -> np.ndarray:
    if isinstance(x, PointSet):
        return x.points
    return np.ascontiguousarray(x, dtype=np.float64)


def kernel_eval(spec: KernelSpec, a, b) -> float:
    """Evaluate the kernel on a single pair of points."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"point shapes differ: {a.shape} vs {b.shape}")
    if spec.family == LAPLACIAN:
        return float(np.exp(-spec.gamma * np.abs(a - b).sum()))
    return float(np.exp(-spec.gamma * np.sum((a - b) ** 2)))


def cross_gram(spec: KernelSpec, rows, cols) -> np.ndarray:
    """Matrix of kernel values K(rows_i, cols_j), shape (R, S)."""
    A = _as_points(rows)
    B = _as_points(cols)
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"dimensions differ: {A.shape[1]} vs {B.shape[1]}")
    if spec.family == LAPLACIAN:
        D = manhattan_cdist(A, B)
    else:
        D = sqeuclid_cdist(A, B)
    return np.exp(-spec.gamma * D)


def gram_matrix(spec: KernelSpec, pts) -> np.ndarray:
    """Symmetric kernel Gram matrix of a point set (unit diagonal)."""
    G = cross_gram(spec, pts, pts)
    # pairwise distances are computed entrywise, so G is symmetric already;
    # enforce exactness against accumulation-order effects
    np.fill_diagonal(G, 1.0)
    return G
