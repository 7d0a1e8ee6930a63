import numpy as np

from core.rng import RngStream
from mechanisms.base import SanitizationMechanism
from utils.errors import ParameterError


def pixel_noise(x, sigma: float, rng: RngStream) -> np.ndarray:
    """x + N(0, σ²I), clamped to [0, 1]."""
    if sigma < 0:
        raise ParameterError(f"pixel noise σ must be non-negative, got {sigma}")
    x = np.asarray(x, dtype=np.float64)
    if sigma == 0:
        return x.copy()
    return np.clip(x + sigma * rng.standard_normal(x.shape), 0.0, 1.0)


class PixelNoiseMechanism(SanitizationMechanism):
    """Noise baseline: perturbs the samples, leaves the latent code alone."""

    tag = "pixel-noise"
    latent_space = False

    def __init__(self, sigma: float = 0.1):
        if sigma < 0:
            raise ParameterError(f"pixel noise σ must be non-negative, got {sigma}")
        self.sigma = sigma

    def replace_sensitive(self, z_s, labels, rng):
        return np.asarray(z_s, dtype=np.float64).copy(), None

    def sanitize_pixels(self, X, rng: RngStream) -> np.ndarray:
        return pixel_noise(X, self.sigma, rng)

    def parameters(self):
        return {"pixel_sigma": self.sigma}
