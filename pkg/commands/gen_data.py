import json
import logging
import os

from commands.common import add_config_flag, add_seed_flag, echo_config, load_config, prepare_output
from dataio.split import split_aux_sensitive
from dataio.storage import MANIFEST, read_json, save_dataset
from dataio.synthetic import generate_synthetic

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("gen-data", help="render a synthetic labeled dataset")
    add_config_flag(parser)
    parser.add_argument("--out", required=True, help="dataset directory to write")
    add_seed_flag(parser)
    parser.add_argument("--split", action="store_true",
                        help="also write the aux/ and private/ halves (data.aux_fraction) inside --out")
    parser.set_defaults(handler=run)


def run(args) -> int:
    config = load_config(args.config)
    data = generate_synthetic(config.data, args.seed)
    prepare_output(args.out)
    save_dataset(data, args.out)
    if args.split:
        aux, private = split_aux_sensitive(data, config.data.aux_fraction, args.seed)
        save_dataset(aux, os.path.join(args.out, "aux"))
        save_dataset(private, os.path.join(args.out, "private"))
    echo_config(args.out, config, seed=args.seed)
    manifest = read_json(os.path.join(args.out, MANIFEST))
    summary = {key: manifest[key] for key in ("n", "sample_shape", "attributes", "checksums", "seed")}
    print(json.dumps(summary, sort_keys=True))
    return 0
