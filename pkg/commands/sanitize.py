import json
import logging

from commands.common import add_config_flag, add_seed_flag, echo_config, load_config, prepare_output
from core.rng import RngStream
from dataio.storage import load_dataset
from decoupler.checkpoint import load_checkpoint
from mechanisms.pipeline import sanitize_dataset, save_sanitized
from schemas.pipeline import MECHANISM_NAMES
from utils.errors import MechanismError
from utils.hash import file_sha256

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("sanitize", help="replace the sensitive latent of every sample")
    parser.add_argument("--data", required=True, help="dataset directory to sanitize")
    parser.add_argument("--model", required=True, help="decoupler checkpoint")
    parser.add_argument("--mechanism", choices=MECHANISM_NAMES, default=None,
                        help="mechanism tag (defaults to mechanism.name of the config)")
    parser.add_argument("--epsilon", type=float, default=None, help="total privacy budget ε")
    parser.add_argument("--out", required=True, help="sanitized dataset directory to write")
    add_config_flag(parser)
    add_seed_flag(parser)
    parser.set_defaults(handler=run)


def run(args) -> int:
    config = load_config(args.config)
    mechanism = args.mechanism or config.mechanism.name
    epsilon = args.epsilon
    if epsilon is None and "epsilon" in config.budget.model_fields_set:
        epsilon = config.budget.epsilon
    if epsilon is not None and not epsilon > 0:
        raise MechanismError(f"ε must be positive, got {epsilon}")
    budget = config.budget.model_copy(update={"epsilon": epsilon})

    data = load_dataset(args.data)
    decoupler = load_checkpoint(args.model)
    sanitized = sanitize_dataset(data, decoupler, mechanism, budget, RngStream(args.seed).child("sanitize"),
                                 config.mechanism.pixel_sigma, decoupler_checksum=file_sha256(args.model))
    prepare_output(args.out)
    save_sanitized(sanitized, args.out)
    echo_config(args.out, config, seed=args.seed, mechanism_used=mechanism, epsilon=epsilon)
    print(json.dumps({"n": sanitized.n, "mechanism": sanitized.mechanism,
                      "budget_used": sanitized.budget_used}, sort_keys=True))
    return 0
