"""
DP per-class Gaussian models of z_S.

z_S is projected by a random p×k orthonormal W and divided by the clip
radius R; each projected row is clipped to the unit ℓ2 ball. Per class the
mean and the second-moment (scatter) matrix are released with Laplace noise
calibrated to their ℓ1 sensitivities 2√p/n_c and 2p/n_c, the covariance is
the PSD-repaired difference S − m mᵀ, and both are scaled back by R.
Classes hold disjoint rows and compose in parallel. Class counts and priors
are treated as public.
"""

import logging
from typing import Optional

import numpy as np

from core.linalg import cholesky_psd, psd_repair, random_orthonormal
from core.rng import RngStream
from core.samplers import sample_gaussian_rows, sample_laplace
from mechanisms.base import SanitizationMechanism, require_epsilon
from models.gaussian import GaussianClassModel
from schemas.budget import PrivacyBudget
from utils.errors import DimensionError, MechanismError, ShapeError

logger = logging.getLogger(__name__)


def mean_sensitivity(p: int, n_c: int) -> float:
    return 2.0 * np.sqrt(p) / n_c


def scatter_sensitivity(p: int, n_c: int) -> float:
    return 2.0 * p / n_c


def project_and_clip(z_s: np.ndarray, W: np.ndarray, radius: float) -> np.ndarray:
    v = z_s @ W.T / radius
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    return v / np.maximum(norms, 1.0)


def _symmetric_laplace(p: int, scale: float, rng: RngStream) -> np.ndarray:
    upper = np.triu_indices(p)
    noise = np.zeros((p, p))
    noise[upper] = sample_laplace(scale, len(upper[0]), rng)
    return noise + np.triu(noise, 1).T


def fit_dp_gmm(Z_S, Y_S, budget: PrivacyBudget, p: Optional[int], rng: RngStream,
               n_classes: Optional[int] = None) -> GaussianClassModel:
    """
    Fit one DP Gaussian per sensitive class.

    Classes are 0..n_classes-1 when ``n_classes`` is given, otherwise the
    distinct labels present. Every class needs at least 2 members.
    """
    budget = require_epsilon(budget, "dp-sample")
    Z_S = np.asarray(Z_S, dtype=np.float64)
    Y_S = np.asarray(Y_S, dtype=np.int64)
    if Z_S.ndim != 2 or Y_S.shape != (Z_S.shape[0],):
        raise ShapeError(f"latents {Z_S.shape} do not match labels {Y_S.shape}")
    k = Z_S.shape[1]
    p = budget.projection_dim(k) if p is None else p
    if p > k:
        raise DimensionError(f"projected dimension p={p} exceeds latent width k={k}")
    classes = list(range(n_classes)) if n_classes is not None else sorted(int(c) for c in np.unique(Y_S))
    counts = [int(np.sum(Y_S == c)) for c in classes]
    for c, n_c in zip(classes, counts):
        if n_c < 2:
            raise MechanismError(f"sensitive class {c} has {n_c} member(s); DP sampling needs at least 2")

    R = budget.clip_radius
    eps_mean, eps_cov = budget.epsilon_mean, budget.epsilon_cov
    W = random_orthonormal(p, k, rng.child("projection"))
    V = project_and_clip(Z_S, W, R)
    means, covariances = [], []
    for c, n_c in zip(classes, counts):
        members = V[Y_S == c]
        class_rng = rng.child(f"class/{c}")
        m_hat = members.mean(axis=0) + sample_laplace(mean_sensitivity(p, n_c) / eps_mean, p,
                                                      class_rng.child("mean"))
        scatter = members.T @ members / n_c
        scatter = scatter + _symmetric_laplace(p, scatter_sensitivity(p, n_c) / eps_cov, class_rng.child("scatter"))
        sigma = psd_repair(scatter - np.outer(m_hat, m_hat))
        means.append(R * m_hat)
        covariances.append(R * R * sigma)
    n = sum(counts)
    model = GaussianClassModel(
        W=W,
        classes=tuple(classes),
        means=np.array(means).reshape(len(classes), p),
        covariances=np.array(covariances).reshape(len(classes), p, p),
        priors=np.array(counts, dtype=np.float64) / n if n else np.zeros(0),
        counts=tuple(counts),
        clip_radius=R,
        epsilon_spent=budget.epsilon,
        epsilon_mean=eps_mean,
        epsilon_cov=eps_cov,
    )
    logger.info("fitted DP Gaussians for %d classes (p=%d, k=%d, ε=%g)", len(classes), p, k, budget.epsilon)
    return model


def sample_dp_gmm(model: GaussianClassModel, n: int, rng: RngStream):
    """
    n i.i.d. labeled draws (z̃_S, ỹ_S): ỹ_S ~ priors, w ~ N(μ_c, Σ_c), z̃_S = Wᵀw.
    No draw depends on any original row.
    """
    if n < 0:
        raise ShapeError(f"sample count must be non-negative, got {n}")
    classes = np.asarray(model.classes, dtype=np.int64)
    if n == 0:
        return np.zeros((0, model.k)), np.zeros(0, dtype=np.int64)
    picks = rng.child("labels").choice(len(classes), size=n, p=model.priors)
    Z = np.empty((n, model.k))
    for index, c in enumerate(classes):
        rows = np.flatnonzero(picks == index)
        if rows.size == 0:
            continue
        sigma = model.covariances[index]
        L = np.zeros_like(sigma) if not np.any(sigma) else cholesky_psd(sigma)
        w = sample_gaussian_rows(model.means[index], L, rows.size, rng.child(f"draws/{int(c)}"))
        Z[rows] = w @ model.W
    return Z, classes[picks]


class DPSamplingMechanism(SanitizationMechanism):
    tag = "dp-sample"
    uses_budget = True
    emits_labels = True

    def __init__(self, budget: PrivacyBudget, n_classes: Optional[int] = None):
        self.budget = require_epsilon(budget, self.tag)
        self.n_classes = n_classes
        self.model: Optional[GaussianClassModel] = None

    def replace_sensitive(self, z_s, labels, rng):
        self.model = fit_dp_gmm(z_s, labels, self.budget, None, rng.child("fit"), self.n_classes)
        return sample_dp_gmm(self.model, np.shape(z_s)[0], rng.child("sample"))

    def budget_used(self):
        used = {
            "epsilon": self.budget.epsilon,
            "mean_fraction": self.budget.mean_fraction,
            "cov_fraction": self.budget.cov_fraction,
            "epsilon_mean": self.budget.epsilon_mean,
            "epsilon_cov": self.budget.epsilon_cov,
            "clip_radius": self.budget.clip_radius,
        }
        if self.model is not None:
            used["projected_dim"] = self.model.p
            used["epsilon_spent"] = self.model.epsilon_spent
        return used
