from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class PrivacyBudget(BaseModel):
    """
    Total ε with its mean/covariance split, the obfuscation clip box [a, b]
    and the sampling clip radius R. ``epsilon`` is None when no budget was
    given, which only suppression, pixel noise and interpolation accept.
    """

    model_config = ConfigDict(extra="forbid")

    epsilon: Optional[float] = Field(1.0, gt=0)
    mean_fraction: float = Field(0.3, gt=0, lt=1)
    cov_fraction: float = Field(0.7, gt=0, lt=1)
    clip_low: float = -3.0
    clip_high: float = 3.0
    clip_radius: float = Field(3.0, gt=0)
    projected_dim: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def check_budget(self):
        if abs(self.mean_fraction + self.cov_fraction - 1.0) > 1e-12:
            raise ValueError("mean_fraction and cov_fraction must sum to 1")
        if not self.clip_low < self.clip_high:
            raise ValueError(f"clip range needs a < b, got [{self.clip_low}, {self.clip_high}]")
        return self

    @property
    def epsilon_mean(self) -> float:
        return self.mean_fraction * self.epsilon

    @property
    def epsilon_cov(self) -> float:
        return self.cov_fraction * self.epsilon

    def projection_dim(self, k: int) -> int:
        return self.projected_dim if self.projected_dim is not None else min(4, k)
