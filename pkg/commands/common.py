import json
import os

from schemas.pipeline import PipelineConfig, load_pipeline_config
from utils.errors import StorageError

CONFIG_ECHO = "config.json"


def prepare_output(directory: str) -> str:
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as exc:
        raise StorageError(f"cannot create output directory {directory}: {exc}") from exc
    return directory


def echo_config(directory: str, config, **extra) -> None:
    """Write the effective (post-default) configuration next to a command's outputs."""
    payload = config.effective() if isinstance(config, PipelineConfig) else dict(config)
    payload.update(extra)
    try:
        with open(os.path.join(directory, CONFIG_ECHO), "w", encoding="utf-8") as f:
            json.dump(payload, f, sort_keys=True, indent=2)
            f.write("\n")
    except OSError as exc:
        raise StorageError(f"cannot write {CONFIG_ECHO} to {directory}: {exc}") from exc


def add_config_flag(parser) -> None:
    parser.add_argument("--config", default=None, help="pipeline configuration JSON (defaults when omitted)")


def add_seed_flag(parser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="root seed for every random stream")


def load_config(path) -> PipelineConfig:
    return load_pipeline_config(path)
