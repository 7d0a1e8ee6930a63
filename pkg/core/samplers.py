import numpy as np

from core.rng import RngStream
from utils.errors import ParameterError, ShapeError


def sample_gaussian(mu, L, rng: RngStream) -> np.ndarray:
    """One draw of mu + L·ξ with ξ standard normal."""
    mu = np.asarray(mu, dtype=np.float64)
    L = np.asarray(L, dtype=np.float64)
    if mu.ndim != 1 or L.shape != (mu.shape[0], mu.shape[0]):
        raise ShapeError(f"mean of length {mu.shape} does not match factor of shape {L.shape}")
    xi = rng.standard_normal(mu.shape[0])
    return mu + L @ xi


def sample_gaussian_rows(mu, L, n: int, rng: RngStream) -> np.ndarray:
    """n draws stacked as rows; row i uses the i-th block of standard normals."""
    mu = np.asarray(mu, dtype=np.float64)
    L = np.asarray(L, dtype=np.float64)
    if mu.ndim != 1 or L.shape != (mu.shape[0], mu.shape[0]):
        raise ShapeError(f"mean of length {mu.shape} does not match factor of shape {L.shape}")
    xi = rng.standard_normal((n, mu.shape[0]))
    return mu + xi @ L.T


def sample_laplace(scale: float, n: int, rng: RngStream) -> np.ndarray:
    """n i.i.d. Lap(0, scale) draws by inverse CDF on uniform(-1/2, 1/2)."""
    if not scale > 0 or not np.isfinite(scale):
        raise ParameterError(f"Laplace scale must be positive and finite, got {scale}")
    if n < 0:
        raise ParameterError(f"sample count must be non-negative, got {n}")
    u = rng.random(n) - 0.5
    tail = np.minimum(2.0 * np.abs(u), 1.0 - np.finfo(np.float64).eps)
    return -scale * np.sign(u) * np.log1p(-tail)
