from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.linalg import is_psd
from utils.errors import ShapeError


@dataclass(frozen=True, eq=False)
class GaussianClassModel:
    """
    DP per-class Gaussians in a p-dimensional random projection of z_S.

    ``W`` is p×k with orthonormal rows; ``means`` is C×p and ``covariances``
    C×p×p, both already rescaled by the clip radius.
    """

    W: np.ndarray
    classes: Tuple[int, ...]
    means: np.ndarray
    covariances: np.ndarray
    priors: np.ndarray
    counts: Tuple[int, ...]
    clip_radius: float
    epsilon_spent: float
    epsilon_mean: float
    epsilon_cov: float

    def __post_init__(self):
        W = np.asarray(self.W, dtype=np.float64)
        means = np.asarray(self.means, dtype=np.float64)
        covariances = np.asarray(self.covariances, dtype=np.float64)
        priors = np.asarray(self.priors, dtype=np.float64)
        if W.ndim != 2 or W.shape[0] > W.shape[1]:
            raise ShapeError(f"projection must be p×k with p <= k, got {W.shape}")
        p, c = W.shape[0], len(self.classes)
        if means.shape != (c, p) or covariances.shape != (c, p, p) or priors.shape != (c,):
            raise ShapeError("class table shapes do not match the projection")
        if len(self.counts) != c:
            raise ShapeError("one member count is needed per class")
        if c and abs(priors.sum() - 1.0) > 1e-9:
            raise ShapeError(f"class priors must sum to 1, got {priors.sum()}")
        for covariance in covariances:
            if not is_psd(covariance, tolerance=1e-9):
                raise ShapeError("class covariances must be positive semi-definite")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covariances", covariances)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "classes", tuple(int(x) for x in self.classes))
        object.__setattr__(self, "counts", tuple(int(x) for x in self.counts))

    @property
    def p(self) -> int:
        return self.W.shape[0]

    @property
    def k(self) -> int:
        return self.W.shape[1]
