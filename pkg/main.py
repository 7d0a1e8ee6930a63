"""
Command-line entry point.

    python main.py gen-data --out runs/data --split
    python main.py train --data runs/data/aux --out runs/model
    python main.py sanitize --data runs/data/private --model runs/model/decoupler.ckpt \
        --mechanism dp-sample --epsilon 1.0 --out runs/sanitized
    python main.py evaluate --sanitized runs/sanitized --aux runs/data/aux --out runs/report
    python main.py sweep --data runs/data --config sweep.json --out runs/sweep
    python main.py plot --points runs/sweep/points.csv --out runs/plot

Exit codes: 0 success, 2 configuration, 3 I/O, 4 numeric failure, 5 mechanism contract.
"""

import argparse
import logging
import sys

from pydantic import ValidationError

from commands import evaluate, gen_data, plot, sanitize, sweep, train
from utils.errors import SanitizerError
from utils.logger import configure_logging

logger = logging.getLogger("sanitizer")

COMMANDS = (gen_data, train, sanitize, evaluate, sweep, plot)
EXIT_CONFIG = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sanitizer", description="Task-agnostic private data release pipeline")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv=None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except SanitizerError as exc:
        logger.error("%s: %s", type(exc).__name__, exc.detail)
        return exc.exit_code
    except ValidationError as exc:
        logger.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    except ValueError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_CONFIG
    except OSError as exc:
        logger.error("I/O failure: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
