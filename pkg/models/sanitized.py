from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from models.dataset import LabeledDataset
from models.gaussian import GaussianClassModel
from utils.errors import ShapeError

MECHANISM_TAGS = ("suppress", "obfuscate", "dp-sample", "pixel-noise", "interpolate")


@dataclass(frozen=True, eq=False)
class SanitizedDataset:
    """
    Decoded sanitized samples with the latent blocks that produced them.

    ``data`` holds X̃ together with the original label matrix (ground truth
    for evaluation); ``synthetic_sensitive`` is Ỹ_S and only dp-sample sets it.
    """

    data: LabeledDataset
    z_sensitive: np.ndarray
    z_non_sensitive: np.ndarray
    mechanism: str
    sensitive_attribute: str
    synthetic_sensitive: Optional[np.ndarray] = None
    budget_used: Optional[Dict] = None
    decoupler_checksum: str = ""
    provenance: Dict = field(default_factory=dict)
    gaussian_model: Optional[GaussianClassModel] = None

    def __post_init__(self):
        if self.mechanism not in MECHANISM_TAGS:
            raise ShapeError(f"unknown mechanism tag {self.mechanism!r}")
        n = self.data.n
        z_s = np.asarray(self.z_sensitive, dtype=np.float64)
        z_ns = np.asarray(self.z_non_sensitive, dtype=np.float64)
        if z_s.ndim != 2 or z_ns.ndim != 2 or z_s.shape[0] != n or z_ns.shape[0] != n:
            raise ShapeError(f"latent blocks must have {n} rows")
        object.__setattr__(self, "z_sensitive", z_s)
        object.__setattr__(self, "z_non_sensitive", z_ns)
        if self.synthetic_sensitive is not None:
            synthetic = np.asarray(self.synthetic_sensitive, dtype=np.int64)
            if synthetic.shape != (n,):
                raise ShapeError(f"synthetic sensitive labels must have {n} entries")
            object.__setattr__(self, "synthetic_sensitive", synthetic)
        self.data.attribute(self.sensitive_attribute)

    @property
    def n(self) -> int:
        return self.data.n

    @property
    def X(self) -> np.ndarray:
        return self.data.X

    @property
    def labels(self) -> np.ndarray:
        return self.data.labels

    def to_labeled(self) -> LabeledDataset:
        return self.data

    def with_synthetic_labels(self) -> LabeledDataset:
        """X̃ labeled with Ỹ_S in the sensitive column (the receiver's view)."""
        if self.synthetic_sensitive is None:
            raise ShapeError("this sanitized dataset carries no synthetic sensitive labels")
        labels = self.data.labels.copy()
        labels[:, self.data.attribute_names.index(self.sensitive_attribute)] = self.synthetic_sensitive
        return LabeledDataset(self.data.X, labels, self.data.schema, self.data.sample_shape, self.data.provenance)
