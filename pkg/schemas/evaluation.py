from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

REPORT_VERSION = 1


class ClassifierSpec(BaseModel):
    """MLP classifier used for attackers, utility models, CAS and E5 receivers."""

    model_config = ConfigDict(extra="forbid")

    hidden: List[int] = Field(default_factory=lambda: [128])
    activation: Literal["relu", "tanh", "sigmoid"] = "relu"
    epochs: int = Field(10, ge=0)
    batch_size: int = Field(64, ge=1)
    learning_rate: float = Field(1e-3, gt=0)


class EvalConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    attacker: ClassifierSpec = Field(default_factory=ClassifierSpec)
    utility: ClassifierSpec = Field(default_factory=ClassifierSpec)
    pretrain_epochs: int = Field(10, ge=0)
    finetune_epochs: int = Field(10, ge=0)
    test_fraction: float = Field(0.2, gt=0, lt=1)
    sensitive_attribute: Optional[str] = None
    utility_attributes: Optional[List[str]] = None


class TradeoffPoint(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config_id: str
    seed: int
    mechanism: str
    epsilon: Optional[float] = None
    hyperparams: Dict[str, float] = Field(default_factory=dict)
    leakage_acc: float = Field(ge=0, le=1)
    prior_acc: float = Field(ge=0, le=1)
    utility_acc: float = Field(ge=0, le=1)

    @property
    def leakage_delta(self) -> float:
        return self.leakage_acc - self.prior_acc

    @property
    def leakage(self) -> float:
        return self.leakage_acc

    @property
    def utility(self) -> float:
        return self.utility_acc


class EvaluationReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    report_version: int = REPORT_VERSION
    mechanism: str
    sensitive_attribute: str
    leakage_acc: float
    prior_acc: float
    leakage_delta: float
    utility_acc: Optional[float] = None
    utility_accs: Dict[str, float] = Field(default_factory=dict)
    cas_acc: Optional[float] = None
    e5_receiver_acc: Optional[float] = None
    e5_attacker_acc: Optional[float] = None

    @model_validator(mode="after")
    def check_version(self):
        if self.report_version != REPORT_VERSION:
            raise ValueError(f"unsupported report_version {self.report_version}")
        return self
