import logging
import os

from commands.common import add_config_flag, add_seed_flag, echo_config, load_config, prepare_output
from core.rng import RngStream
from dataio.storage import load_dataset
from decoupler.checkpoint import save_checkpoint
from decoupler.model import aligner_accuracy
from decoupler.training import train_decoupler
from evaluation.records import write_loss_csv
from utils.errors import NumericError

logger = logging.getLogger(__name__)

CHECKPOINT = "decoupler.ckpt"
LOSSES = "losses.csv"


def register(subparsers) -> None:
    parser = subparsers.add_parser("train", help="train the global decoupler on auxiliary data")
    parser.add_argument("--data", required=True, help="auxiliary dataset directory (must carry sensitive labels)")
    add_config_flag(parser)
    parser.add_argument("--out", required=True, help="output directory for checkpoint and loss log")
    add_seed_flag(parser)
    parser.set_defaults(handler=run)


def run(args) -> int:
    config = load_config(args.config)
    aux = load_dataset(args.data)
    prepare_output(args.out)
    echo_config(args.out, config, seed=args.seed)
    checkpoint = os.path.join(args.out, CHECKPOINT)
    epochs = []

    def on_epoch_end(record, params):
        epochs.append(record)
        save_checkpoint(checkpoint, params)
        write_loss_csv(os.path.join(args.out, LOSSES), epochs)

    try:
        params, log = train_decoupler(config.decoupler, aux, RngStream(args.seed).child("decoupler"), on_epoch_end)
    except NumericError as exc:
        if exc.last_good is not None and not epochs:
            save_checkpoint(checkpoint, exc.last_good)
        logger.error("%s; last good checkpoint kept at %s", exc.detail, checkpoint)
        raise
    digest = save_checkpoint(checkpoint, params)
    write_loss_csv(os.path.join(args.out, LOSSES), log.epochs)
    accuracy = aligner_accuracy(params, aux)
    print(f"checkpoint={checkpoint} sha256={digest} aligner_accuracy={accuracy}")
    return 0
