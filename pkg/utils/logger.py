import logging
import sys

from utils.config import get_log_level

_LEVELS = {
    "error": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(level: str | None = None) -> None:
    """Route every logger to stderr at the level named by SANITIZER_LOG."""
    name = level or get_log_level()
    root = logging.getLogger()
    root.setLevel(_LEVELS.get(name, logging.INFO))
    for handler in list(root.handlers):
        if getattr(handler, "_sanitizer", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._sanitizer = True
    root.addHandler(handler)
