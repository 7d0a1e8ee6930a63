import os

from commands.common import echo_config, prepare_output
from evaluation.metrics import tradeoff_curve
from evaluation.plotting import plot_tradeoff
from evaluation.records import read_points_csv, write_pareto_csv

PARETO = "pareto.csv"
FIGURE = "tradeoff.svg"


def register(subparsers) -> None:
    parser = subparsers.add_parser("plot", help="pareto front, AuC and SVG of a points CSV")
    parser.add_argument("--points", required=True, help="points CSV written by sweep")
    parser.add_argument("--out", required=True, help="directory for pareto.csv and tradeoff.svg")
    parser.add_argument("--chance-utility", type=float, default=0.5, help="utility of the trivial model")
    parser.add_argument("--chance-leakage", type=float, default=None,
                        help="attacker accuracy without data (default: lowest prior_acc in the CSV)")
    parser.set_defaults(handler=run)


def run(args) -> int:
    points = read_points_csv(args.points)
    chance_leakage = args.chance_leakage
    if chance_leakage is None:
        chance_leakage = min((p.prior_acc for p in points), default=0.0)
    curve = tradeoff_curve(points, chance_leakage, args.chance_utility)
    prepare_output(args.out)
    write_pareto_csv(os.path.join(args.out, PARETO), curve.pareto)
    plot_tradeoff(curve.points, curve.pareto, chance_leakage, args.chance_utility, os.path.join(args.out, FIGURE))
    echo_config(args.out, {"points": args.points, "chance_leakage": chance_leakage,
                           "chance_utility": args.chance_utility, "auc": curve.auc})
    print(f"auc={curve.auc!r}")
    return 0
