"""
Sample distance covariance and distance correlation.

For batches X (n×d₁) and Y (n×d₂) with double-centred distance matrices
Â and B̂:

    dcov(X, Y)  = (1/n²) Σⱼ Σₖ Âⱼₖ B̂ⱼₖ
    dcorr(X, Y) = dcov(X, Y) / √(dcov(X, X) · dcov(Y, Y))

Both are differentiable through ``nets.autodiff``; the plain functions accept
arrays and return floats.
"""

import numpy as np

from core.rng import RngStream
from nets.autodiff import Tensor, as_tensor, pairwise_distances
from utils.errors import ShapeError

DEGENERATE_DCOV = 1e-12
DISTANCE_SMOOTHING = 1e-12


def _as_batch(X) -> Tensor:
    t = as_tensor(X if isinstance(X, Tensor) else np.asarray(X, dtype=np.float64))
    if t.ndim == 1:
        t = Tensor(t.data[:, None]) if not t.requires_grad else t[:, None]
    if t.ndim != 2:
        raise ShapeError(f"expected an n×d batch, got shape {t.shape}")
    return t


def _check_pair(X: Tensor, Y: Tensor) -> None:
    if X.shape[0] != Y.shape[0]:
        raise ShapeError(f"row counts differ: {X.shape[0]} vs {Y.shape[0]}")
    if X.shape[0] < 2:
        raise ShapeError("distance statistics need at least 2 rows")


def double_center_tensor(D: Tensor) -> Tensor:
    return D - D.mean(axis=0, keepdims=True) - D.mean(axis=1, keepdims=True) + D.mean()


def centered_distances(X) -> Tensor:
    return double_center_tensor(pairwise_distances(_as_batch(X), DISTANCE_SMOOTHING))


def dcov_tensor(X, Y) -> Tensor:
    X, Y = _as_batch(X), _as_batch(Y)
    _check_pair(X, Y)
    n = X.shape[0]
    return (centered_distances(X) * centered_distances(Y)).sum() * (1.0 / (n * n))


def dcorr_tensor(X, Y) -> Tensor:
    X, Y = _as_batch(X), _as_batch(Y)
    _check_pair(X, Y)
    n = X.shape[0]
    A, B = centered_distances(X), centered_distances(Y)
    scale = 1.0 / (n * n)
    dcov_xy = (A * B).sum() * scale
    dcov_xx = (A * A).sum() * scale
    dcov_yy = (B * B).sum() * scale
    if dcov_xx.item() < DEGENERATE_DCOV or dcov_yy.item() < DEGENERATE_DCOV:
        # A constant batch carries no detectable dependence.
        return Tensor(0.0)
    return dcov_xy / (dcov_xx * dcov_yy).sqrt()


def pairwise_dist(X) -> np.ndarray:
    return pairwise_distances(_as_batch(np.asarray(X, dtype=np.float64)), DISTANCE_SMOOTHING).data


def double_center(D) -> np.ndarray:
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ShapeError(f"double centring needs a square matrix, got shape {D.shape}")
    return double_center_tensor(Tensor(D)).data


def dcov(X, Y) -> float:
    return dcov_tensor(np.asarray(X, dtype=np.float64), np.asarray(Y, dtype=np.float64)).item()


def dcorr(X, Y) -> float:
    return dcorr_tensor(np.asarray(X, dtype=np.float64), np.asarray(Y, dtype=np.float64)).item()


def dcorr_permutation_test(X, Y, rng: RngStream, n_permutations: int = 199):
    """
    Permutation test of independence between the rows of X and Y.

    Returns (statistic, p-value) with p = (1 + #{perm ≥ observed}) / (1 + n_permutations).
    """
    A = centered_distances(np.asarray(X, dtype=np.float64)).data
    B = centered_distances(np.asarray(Y, dtype=np.float64)).data
    if A.shape != B.shape:
        raise ShapeError(f"row counts differ: {A.shape[0]} vs {B.shape[0]}")
    norm = np.sqrt(np.vdot(A, A) * np.vdot(B, B))
    if norm < DEGENERATE_DCOV * A.shape[0] ** 2:
        return 0.0, 1.0

    def statistic(b):
        return float(np.vdot(A, b) / norm)

    observed = statistic(B)
    exceed = 0
    for _ in range(n_permutations):
        perm = rng.permutation(A.shape[0])
        if statistic(B[np.ix_(perm, perm)]) >= observed:
            exceed += 1
    return observed, (1 + exceed) / (1 + n_permutations)
