import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from schemas.budget import PrivacyBudget
from schemas.data import DataConfig
from schemas.decoupler import DecouplerConfig
from schemas.evaluation import EvalConfig
from utils.errors import ConfigError

MechanismName = Literal["suppress", "obfuscate", "dp-sample", "pixel-noise", "interpolate"]
MECHANISM_NAMES = ("suppress", "obfuscate", "dp-sample", "pixel-noise", "interpolate")


class MechanismConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: MechanismName = "dp-sample"
    pixel_sigma: float = Field(0.1, ge=0)


class SweepEntry(BaseModel):
    """One point of a trade-off grid: overrides applied on top of the pipeline sections."""

    model_config = ConfigDict(extra="forbid")

    config_id: str = Field(min_length=1)
    seed: int = Field(0, ge=0)
    mechanism: Optional[MechanismName] = None
    decoupler: Dict[str, Any] = Field(default_factory=dict)
    budget: Dict[str, Any] = Field(default_factory=dict)
    pixel_sigma: Optional[float] = Field(None, ge=0)


class PipelineConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    data: DataConfig = Field(default_factory=DataConfig)
    decoupler: DecouplerConfig = Field(default_factory=DecouplerConfig)
    mechanism: MechanismConfig = Field(default_factory=MechanismConfig)
    budget: PrivacyBudget = Field(default_factory=PrivacyBudget)
    eval: EvalConfig = Field(default_factory=EvalConfig)
    sweep_grid: List[SweepEntry] = Field(default_factory=list, alias="sweep-grid")

    def effective(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)


def _describe(exc: ValidationError) -> str:
    lines = []
    for error in exc.errors():
        where = ".".join(str(part) for part in error["loc"]) or "<root>"
        lines.append(f"{where}: {error['msg']}")
    return "; ".join(lines)


def parse_pipeline_config(text: str, source: str = "<config>") -> PipelineConfig:
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top-level JSON value must be an object")
    try:
        return PipelineConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"{source}: {_describe(exc)}") from exc


def load_pipeline_config(path: Optional[str]) -> PipelineConfig:
    """Read a pipeline JSON document; a missing path means all defaults."""
    if path is None:
        return PipelineConfig()
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_pipeline_config(text, path)


def apply_overrides(model: BaseModel, overrides: Dict[str, Any], section: str) -> BaseModel:
    """Re-validate ``model`` with ``overrides`` merged in; bad keys raise ConfigError."""
    if not overrides:
        return model
    try:
        return type(model).model_validate({**model.model_dump(), **overrides})
    except ValidationError as exc:
        raise ConfigError(f"{section}: {_describe(exc)}") from exc
