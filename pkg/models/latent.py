from dataclasses import dataclass

import numpy as np

from utils.errors import ShapeError


@dataclass(frozen=True, eq=False)
class LatentCode:
    """An m-vector (or a batch of them, one per row) split at index k."""

    z: np.ndarray
    k: int

    def __post_init__(self):
        z = np.asarray(self.z, dtype=np.float64)
        if z.ndim not in (1, 2):
            raise ShapeError(f"latent must be a vector or a batch of rows, got shape {z.shape}")
        m = z.shape[-1]
        if not 1 <= self.k < m:
            raise ShapeError(f"split index k={self.k} must satisfy 1 <= k < m={m}")
        object.__setattr__(self, "z", z)

    @property
    def m(self) -> int:
        return self.z.shape[-1]

    @property
    def z_s(self) -> np.ndarray:
        return self.z[..., :self.k]

    @property
    def z_ns(self) -> np.ndarray:
        return self.z[..., self.k:]

    @classmethod
    def join(cls, z_s, z_ns) -> "LatentCode":
        z_s = np.asarray(z_s, dtype=np.float64)
        return cls(np.concatenate([z_s, np.asarray(z_ns, dtype=np.float64)], axis=-1), z_s.shape[-1])

    def with_sensitive(self, z_s) -> "LatentCode":
        return LatentCode.join(z_s, self.z_ns)
