import os
from dotenv import load_dotenv

load_dotenv()

LOG_LEVELS = ("error", "info", "debug")
DEFAULT_LOG_LEVEL = "info"

SANITIZER_RUNS_DIR = os.getenv("SANITIZER_RUNS_DIR", "runs")


def get_log_level() -> str:
    """Read SANITIZER_LOG at call time; unknown values fall back to info."""
    level = os.getenv("SANITIZER_LOG", DEFAULT_LOG_LEVEL).strip().lower()
    if level not in LOG_LEVELS:
        return DEFAULT_LOG_LEVEL
    return level
