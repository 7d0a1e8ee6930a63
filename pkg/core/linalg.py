import numpy as np
import scipy.linalg

from core.rng import RngStream
from utils.errors import DimensionError, ShapeError

SYMMETRY_TOLERANCE = 1e-9
EIGEN_FLOOR = 1e-6


def random_orthonormal(p: int, k: int, rng: RngStream) -> np.ndarray:
    """
    Draw a p×k matrix with orthonormal rows.

    A k×p standard Gaussian matrix is QR-factorized and the orthonormal
    factor transposed, so W @ W.T = I_p.
    """
    if p < 1 or k < 1:
        raise DimensionError(f"projection dimensions must be positive, got p={p}, k={k}")
    if p > k:
        raise DimensionError(f"projected dimension p={p} exceeds source dimension k={k}")
    gaussian = rng.standard_normal((k, p))
    q, r = scipy.linalg.qr(gaussian, mode="economic")
    # Fix the sign ambiguity of QR so the draw is a deterministic function of the Gaussian matrix.
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return (q * signs).T.copy()


def _check_symmetric(S: np.ndarray) -> np.ndarray:
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {S.shape}")
    if S.size and np.max(np.abs(S - S.T)) > SYMMETRY_TOLERANCE:
        raise ShapeError("matrix is not symmetric within 1e-9")
    if not np.all(np.isfinite(S)):
        raise ShapeError("matrix has non-finite entries")
    return 0.5 * (S + S.T)


def eigen_floor(S: np.ndarray) -> float:
    eigenvalues = scipy.linalg.eigvalsh(S)
    return EIGEN_FLOOR * max(1.0, float(eigenvalues[-1]))


def psd_repair(S: np.ndarray) -> np.ndarray:
    """Clip eigenvalues below 1e-6·max(1, λ_max) up to that floor."""
    S = _check_symmetric(S)
    if S.size == 0:
        return S
    eigenvalues, vectors = scipy.linalg.eigh(S)
    floor = EIGEN_FLOOR * max(1.0, float(eigenvalues[-1]))
    if eigenvalues[0] >= floor:
        return S
    clipped = np.maximum(eigenvalues, floor)
    repaired = (vectors * clipped) @ vectors.T
    return 0.5 * (repaired + repaired.T)


def cholesky_psd(S: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L @ L.T equal to the eigen-clipped S."""
    repaired = psd_repair(S)
    if repaired.size == 0:
        return repaired
    return scipy.linalg.cholesky(repaired, lower=True)


def is_psd(S: np.ndarray, tolerance: float = 1e-10) -> bool:
    S = np.asarray(S, dtype=np.float64)
    if S.size == 0:
        return True
    return bool(scipy.linalg.eigvalsh(0.5 * (S + S.T))[0] >= -tolerance)
