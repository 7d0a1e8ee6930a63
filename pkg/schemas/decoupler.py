from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.nets import NetworkSpec

LossKind = Literal["cross-entropy", "p-norm"]
HiddenActivation = Literal["relu", "tanh", "sigmoid"]


class DecouplerSpecs(BaseModel):
    model_config = ConfigDict(frozen=True)

    encoder: NetworkSpec
    decoder: NetworkSpec
    aligners: List[NetworkSpec]
    adversaries: List[NetworkSpec]


class DecouplerConfig(BaseModel):
    """Hyper-parameters of the global decoupler and its joint training objective."""

    model_config = ConfigDict(extra="forbid")

    k: int = Field(8, ge=1)
    m: int = Field(32, ge=2)
    beta: float = Field(5.0, ge=0)
    alpha1: float = Field(1.0, ge=0)
    alpha2: float = Field(1.0, ge=0)
    alpha3: float = Field(100.0, ge=0)
    alpha4: float = Field(1.0, ge=0)
    epochs: int = Field(30, ge=1)
    batch_size: int = Field(64, ge=64)
    adversary_steps: int = Field(1, ge=1)
    aligner_loss: LossKind = "cross-entropy"
    adversary_loss: LossKind = "cross-entropy"
    p_norm: float = Field(2.0, ge=1)
    learning_rate: float = Field(1e-3, gt=0)
    adam_beta1: float = Field(0.9, ge=0, lt=1)
    adam_beta2: float = Field(0.999, ge=0, lt=1)
    encoder_hidden: List[int] = Field(default_factory=lambda: [256])
    decoder_hidden: List[int] = Field(default_factory=lambda: [256])
    aligner_hidden: List[int] = Field(default_factory=lambda: [64])
    adversary_hidden: List[int] = Field(default_factory=lambda: [64])
    activation: HiddenActivation = "relu"
    sensitive_attributes: Optional[List[str]] = None

    @model_validator(mode="after")
    def check_split(self):
        if not 1 <= self.k < self.m:
            raise ValueError(f"split index k={self.k} must satisfy 1 <= k < m={self.m}")
        hidden = self.encoder_hidden + self.decoder_hidden + self.aligner_hidden + self.adversary_hidden
        if any(width < 1 for width in hidden):
            raise ValueError("hidden widths must be positive")
        return self

    @property
    def alphas(self) -> tuple:
        return (self.alpha1, self.alpha2, self.alpha3, self.alpha4)

    def network_specs(self, input_dim: int, class_counts: List[int]) -> DecouplerSpecs:
        """Encoder emits 2m values; aligners read z_S (width k); adversaries read z_NS (width m - k)."""
        act = self.activation
        return DecouplerSpecs(
            encoder=NetworkSpec.mlp(input_dim, self.encoder_hidden, 2 * self.m, act, "gaussian-params"),
            decoder=NetworkSpec.mlp(self.m, self.decoder_hidden, input_dim, act, "logits"),
            aligners=[NetworkSpec.mlp(self.k, self.aligner_hidden, c, act, "logits") for c in class_counts],
            adversaries=[
                NetworkSpec.mlp(self.m - self.k, self.adversary_hidden, c, act, "logits") for c in class_counts
            ],
        )

    def beta_vae(self) -> "DecouplerConfig":
        """The same model trained as a plain β-VAE (aligner, decorrelation and adversary switched off)."""
        return self.model_copy(update={"alpha2": 0.0, "alpha3": 0.0, "alpha4": 0.0})
