"""Variational autoencoder primitives, usable on arrays and on Tensors."""

import numpy as np

from nets.autodiff import Tensor
from utils.errors import ShapeError


def _check_pair(a, b, what: str):
    if np.shape(a) != np.shape(b):
        raise ShapeError(f"{what}: shapes {np.shape(a)} and {np.shape(b)} differ")


def reparameterize(mu, logvar, noise):
    """mu + exp(logvar / 2) ⊙ noise."""
    _check_pair(getattr(mu, "data", mu), getattr(logvar, "data", logvar), "reparameterize")
    _check_pair(getattr(mu, "data", mu), noise, "reparameterize")
    if isinstance(mu, Tensor) or isinstance(logvar, Tensor):
        return mu + (logvar * 0.5).exp() * np.asarray(noise, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    return mu + np.exp(0.5 * np.asarray(logvar, dtype=np.float64)) * np.asarray(noise, dtype=np.float64)


def kl_diag_gaussian(mu, logvar) -> float:
    """KL( N(mu, diag exp(logvar)) || N(0, I) ) for a single latent vector."""
    mu = np.asarray(mu, dtype=np.float64)
    logvar = np.asarray(logvar, dtype=np.float64)
    _check_pair(mu, logvar, "kl_diag_gaussian")
    return float(0.5 * np.sum(np.exp(logvar) + mu * mu - 1.0 - logvar))


def kl_diag_gaussian_rows(mu: Tensor, logvar: Tensor) -> Tensor:
    """Per-row KL to the standard normal prior, differentiable."""
    _check_pair(mu.data, logvar.data, "kl_diag_gaussian")
    return (logvar.exp() + mu * mu - 1.0 - logvar).sum(axis=1) * 0.5
