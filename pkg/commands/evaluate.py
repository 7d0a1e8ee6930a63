import json
import os

from commands.common import add_config_flag, add_seed_flag, echo_config, load_config, prepare_output
from core.rng import RngStream
from dataio.storage import load_dataset
from evaluation.protocol import evaluate_sanitized
from evaluation.records import write_report
from mechanisms.pipeline import load_sanitized

REPORT = "report.json"


def register(subparsers) -> None:
    parser = subparsers.add_parser("evaluate", help="measure leakage and utility of a sanitized dataset")
    parser.add_argument("--sanitized", required=True, help="sanitized dataset directory")
    parser.add_argument("--aux", required=True, help="clean auxiliary dataset for attacker pretraining")
    parser.add_argument("--clean-test", default=None, help="clean test dataset for CAS / E5")
    parser.add_argument("--cas", action="store_true", help="report the classification accuracy score")
    parser.add_argument("--e5", action="store_true", help="report sensitive-distribution learning (dp-sample only)")
    parser.add_argument("--out", required=True, help="directory for report.json")
    add_config_flag(parser)
    add_seed_flag(parser)
    parser.set_defaults(handler=run)


def run(args) -> int:
    config = load_config(args.config)
    sanitized = load_sanitized(args.sanitized)
    aux = load_dataset(args.aux)
    clean_test = load_dataset(args.clean_test) if args.clean_test else None
    report = evaluate_sanitized(sanitized, aux, config.eval, RngStream(args.seed).child("evaluate"),
                                clean_test, cas=args.cas, e5=args.e5)
    prepare_output(args.out)
    write_report(os.path.join(args.out, REPORT), report)
    echo_config(args.out, config, seed=args.seed)
    print(json.dumps(report.model_dump(mode="json"), sort_keys=True))
    return 0
