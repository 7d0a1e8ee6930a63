from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class AttributeRole(str, Enum):
    sensitive = "sensitive"
    non_sensitive = "non-sensitive"
    unassigned = "unassigned"


class AttributeSchema(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(min_length=1)
    cardinality: int = Field(ge=2, le=65535)
    role: AttributeRole = AttributeRole.unassigned


class SynthConfig(BaseModel):
    """
    Synthetic labeled-image generator settings.

    The sensitive class picks the hue band of the background gradient, the
    utility class picks the foreground shape, and the nuisance factors move,
    scale and brighten that shape.
    """

    model_config = ConfigDict(extra="forbid")

    n: int = Field(20000, ge=1)
    image_size: Tuple[int, int, int] = (16, 16, 3)
    sensitive_classes: int = Field(4, ge=2)
    utility_classes: int = Field(2, ge=2, le=4)
    sensitive_weights: Optional[List[float]] = None
    utility_weights: Optional[List[float]] = None
    nuisance_factors: int = Field(3, ge=0, le=3)
    correlation: float = Field(0.0, ge=0.0, le=1.0)
    shard_size: int = Field(4096, ge=1)

    @model_validator(mode="after")
    def check_config(self):
        height, width, channels = self.image_size
        if height < 4 or width < 4:
            raise ValueError(f"image_size must be at least 4×4, got {height}×{width}")
        if channels != 3:
            raise ValueError("image_size must have 3 colour channels")
        for name, weights, count in (
            ("sensitive_weights", self.sensitive_weights, self.sensitive_classes),
            ("utility_weights", self.utility_weights, self.utility_classes),
        ):
            if weights is None:
                continue
            if len(weights) != count:
                raise ValueError(f"{name} needs {count} entries, got {len(weights)}")
            if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
                raise ValueError(f"{name} must be non-negative and sum to 1")
        return self

    def weights(self, role: str) -> List[float]:
        if role == "sensitive":
            given, count = self.sensitive_weights, self.sensitive_classes
        else:
            given, count = self.utility_weights, self.utility_classes
        return list(given) if given is not None else [1.0 / count] * count


class DataConfig(SynthConfig):
    aux_fraction: float = Field(0.5, gt=0.0, lt=1.0)

    def synth(self) -> SynthConfig:
        return SynthConfig(**self.model_dump(exclude={"aux_fraction"}))
