from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from schemas.data import AttributeRole, AttributeSchema
from utils.errors import MissingLabelsError, ShapeError


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """
    N samples flattened row-major to float32 (N × H·W·C) in [0, 1], an
    N × A matrix of category ids and one AttributeSchema per label column.
    """

    X: np.ndarray
    labels: np.ndarray
    schema: Tuple[AttributeSchema, ...]
    sample_shape: Tuple[int, int, int]
    provenance: Dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.float32)
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        schema = tuple(self.schema)
        shape = tuple(int(s) for s in self.sample_shape)
        if labels.ndim == 1:
            labels = labels[:, None]
        if X.ndim != 2 or X.shape[1] != int(np.prod(shape)):
            raise ShapeError(f"samples of shape {X.shape} do not match sample shape {shape}")
        if labels.ndim != 2 or labels.shape != (X.shape[0], len(schema)):
            raise ShapeError(f"labels of shape {labels.shape} need {X.shape[0]} rows and {len(schema)} columns")
        names = [a.name for a in schema]
        if len(set(names)) != len(names):
            raise ShapeError(f"attribute names must be unique, got {names}")
        if not np.all(np.isfinite(X)) or (X.size and (X.min() < 0.0 or X.max() > 1.0)):
            raise ShapeError("samples must be finite and lie in [0, 1]")
        for j, attribute in enumerate(schema):
            column = labels[:, j]
            if column.size and (column.min() < 0 or column.max() >= attribute.cardinality):
                raise ShapeError(f"labels of {attribute.name!r} must lie in [0, {attribute.cardinality})")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "sample_shape", shape)
        object.__setattr__(self, "provenance", dict(self.provenance))

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def input_dim(self) -> int:
        return self.X.shape[1]

    @property
    def attribute_names(self) -> List[str]:
        return [a.name for a in self.schema]

    def attribute(self, name: str) -> AttributeSchema:
        for attribute in self.schema:
            if attribute.name == name:
                return attribute
        raise MissingLabelsError(f"dataset has no attribute {name!r} (has {self.attribute_names})")

    def column(self, name: str) -> np.ndarray:
        self.attribute(name)
        return self.labels[:, self.attribute_names.index(name)]

    def names_with_role(self, role: AttributeRole) -> List[str]:
        return [a.name for a in self.schema if a.role == role]

    def sensitive_names(self, requested: Optional[List[str]] = None) -> List[str]:
        """Requested names if given, else those tagged sensitive; at least one is required."""
        names = list(requested) if requested else self.names_with_role(AttributeRole.sensitive)
        if not names:
            raise MissingLabelsError("dataset carries no sensitive attribute labels")
        for name in names:
            self.attribute(name)
        return names

    def non_sensitive_names(self, sensitive: Optional[List[str]] = None) -> List[str]:
        sensitive = set(self.sensitive_names(sensitive))
        return [name for name in self.attribute_names if name not in sensitive]

    def subset(self, indices) -> "LabeledDataset":
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.X[indices], self.labels[indices], self.schema, self.sample_shape, self.provenance)

    def with_samples(self, X: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(X, self.labels, self.schema, self.sample_shape, self.provenance)

    def same_schema(self, other: "LabeledDataset") -> bool:
        return self.schema == other.schema and self.sample_shape == other.sample_shape

    def equals(self, other: "LabeledDataset") -> bool:
        return (
            self.same_schema(other)
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.labels, other.labels)
            and self.provenance == other.provenance
        )
