"""The registration loop: alternating closed-form updates.

Source points double as fuzzy clustering centroids, target points as
members.  Each iteration updates, in closed form: the membership matrix U,
the cluster-size weights alpha, the kernel displacement coefficients c, the
deformed source T = Y + L c, and the shared isotropic variance sigma^2.
Convergence is declared on the relative change of sigma^2.

Both sets are normalized independently before optimization; the deformed
output is mapped back through the inverse of the TARGET's transform (after
convergence the deformed source lives in the normalized target frame).
"""

from __future__ import annotations

import time

import numpy as np

from .core import (
    NormalizationTransform,
    PointSet,
    RegistrationConfig,
    RegistrationResult,
    denormalize,
    normalize,
)
from .errors import DimensionMismatch
from .kernels import gram_matrix, sqeuclid_cdist
from .lowrank import NystromFactor, apply_factor, build_nystrom, regularized_solve

SIGMA2_FLOOR = 1e-8
# column-mass threshold below which a centroid is considered unattended and
# its regularization diagonal is clamped, freezing its displacement
DEGENERATE_MASS = 1e-12
DMAX = 1e12

_CHUNK = 512


def update_membership(X, T, sigma2, alpha, lam) -> np.ndarray:
    """Row-stochastic fuzzy membership update.

    Row i is the softmax of -||x_i - t_j||^2 / (sigma2 * lam) + log(alpha_j),
    evaluated with a per-row max shift so no row can underflow entirely.
    """
    D = sqeuclid_cdist(X, T) / sigma2
    log_alpha = np.log(np.maximum(alpha, 1e-300))
    logits = -D / lam + log_alpha[None, :]
    logits -= logits.max(axis=1, keepdims=True)
    A = np.exp(logits)
    rowsum = A.sum(axis=1)
    dead = rowsum <= 0.0
    if dead.any():  # cannot happen after the max shift; defensive one-hot fallback
        idx = D[dead].argmin(axis=1)
        A[dead] = 0.0
        A[np.flatnonzero(dead), idx] = 1.0
        rowsum = A.sum(axis=1)
    return A / rowsum[:, None]


def update_alpha(U: np.ndarray) -> np.ndarray:
    """Cluster-size weights: column means of the membership matrix."""
    return U.sum(axis=0) / U.shape[0]


def update_sigma2(X, T, U) -> float:
    """Shared isotropic variance sigma^2 = sum_ij u_ij ||x_i - t_j||^2 / (n M).

    Evaluated in matrix form without materializing the M x C distance matrix
    a second time; floored at SIGMA2_FLOOR.
    """
    M, n = X.shape
    row_mass = U.sum(axis=1)  # ~1 per row, kept explicit for exactness
    col_mass = U.sum(axis=0)
    total = float(np.einsum("i,ij,ij->", row_mass, X, X))
    total -= 2.0 * float(np.einsum("ij,ij->", U.T @ X, T))
    total += float(np.einsum("j,jk,jk->", col_mass, T, T))
    return max(total / (n * M), SIGMA2_FLOOR)


def update_coefficients(gram_or_factor, U, X, Y, zeta, sigma2) -> np.ndarray:
    """Kernel coefficients solving (L + zeta sigma^2 diag(s)^-1) c = diag(s)^-1 U^T X - Y.

    s holds the membership column sums.  Columns with negligible mass get
    their diagonal clamped to DMAX, which freezes that centroid's
    displacement toward zero.
    """
    s = U.sum(axis=0)
    degenerate = s < DEGENERATE_MASS
    s_safe = np.where(degenerate, 1.0, s)
    d = np.where(degenerate, DMAX, zeta * sigma2 / s_safe)
    B = (U.T @ X) / s_safe[:, None] - Y
    B[degenerate] = 0.0
    return regularized_solve(gram_or_factor, d, B)


def apply_deformation(Y, gram_or_factor, c) -> np.ndarray:
    """Deformed source T = Y + L c (dense) or Y + E W^-1 E^T c (low rank)."""
    if isinstance(gram_or_factor, np.ndarray):
        return Y + gram_or_factor @ c
    return Y + apply_factor(gram_or_factor, c)


def _initial_sigma2(X: np.ndarray, Y: np.ndarray) -> float:
    """Mean squared distance over all pairs divided by n, blockwise."""
    M, n = X.shape
    N = Y.shape[0]
    total = 0.0
    for start in range(0, M, _CHUNK):
        total += float(sqeuclid_cdist(X[start : start + _CHUNK], Y).sum())
    return max(total / (n * M * N), SIGMA2_FLOOR)


def register(source: PointSet, target: PointSet, cfg: RegistrationConfig | None = None) -> RegistrationResult:
    """Register a source point set onto a target.

    Returns the deformed source in the target's original coordinate frame,
    the kernel coefficients (in normalized coordinates), and per-iteration
    sigma^2 / data-term traces.  Non-convergence within max_iters is reported
    through ``converged=False``, not as an error.
    """
    if cfg is None:
        cfg = RegistrationConfig()
    if source.dim != target.dim:
        raise DimensionMismatch(f"source dim {source.dim} != target dim {target.dim}")
    t0 = time.perf_counter()

    target_n = normalize(target)
    source_n = normalize(source)
    X = target_n.points
    Y = source_n.points
    M, n = X.shape
    C = Y.shape[0]

    # kernel fixed at the original (normalized) source positions for the
    # whole run; the displacement field is one kernel regression, re-solved
    # each iteration
    if cfg.approx_ratio >= 1.0:
        op: np.ndarray | NystromFactor = gram_matrix(cfg.kernel, Y)
    else:
        op = build_nystrom(cfg.kernel, Y, cfg.approx_ratio, seed=cfg.seed)

    sigma2 = _initial_sigma2(X, Y)
    alpha = np.full(C, 1.0 / C)
    coeffs = np.zeros((C, n))
    T = Y.copy()

    sigma2_trace: list[float] = []
    objective_trace: list[float] = []
    converged = False
    iteration = 0
    for iteration in range(1, cfg.max_iters + 1):
        U = update_membership(X, T, sigma2, alpha, cfg.lam)
        alpha = update_alpha(U)
        coeffs = update_coefficients(op, U, X, Y, cfg.zeta, sigma2)
        T = apply_deformation(Y, op, coeffs)
        new_sigma2 = update_sigma2(X, T, U)
        sigma2_trace.append(new_sigma2)
        # data term: membership-weighted squared deviation
        objective_trace.append(new_sigma2 * n * M)
        if abs(new_sigma2 - sigma2) / sigma2 < cfg.tol:
            sigma2 = new_sigma2
            converged = True
            break
        sigma2 = new_sigma2

    deformed = denormalize(PointSet(T), target_n.norm)
    return RegistrationResult(
        deformed=deformed,
        coefficients=coeffs,
        sigma2_trace=sigma2_trace,
        objective_trace=objective_trace,
        iterations=iteration,
        converged=converged,
        wall_time=time.perf_counter() - t0,
    )
