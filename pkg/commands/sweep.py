import os

from commands.common import add_config_flag, add_seed_flag, echo_config, load_config, prepare_output
from dataio.storage import load_dataset
from evaluation.records import write_failures, write_points_csv
from evaluation.sweep import ablation_grid, tradeoff_sweep

POINTS = "points.csv"
FAILURES = "failures.json"


def _floats(text: str):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str):
    return [int(x) for x in text.split(",") if x.strip()]


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="evaluate every entry of the sweep grid")
    parser.add_argument("--data", required=True, help="dataset directory (split into aux / private / clean test)")
    add_config_flag(parser)
    parser.add_argument("--out", required=True, help="directory for points.csv and failures.json")
    parser.add_argument("--jobs", type=int, default=1, help="concurrent sweep workers")
    add_seed_flag(parser)
    parser.add_argument("--ablation-epsilons", type=_floats, default=None,
                        help="comma-separated ε values; replaces the grid with the ablation grid")
    parser.add_argument("--ablation-seeds", type=_ints, default=None,
                        help="comma-separated seeds for the ablation grid (default: --seed)")
    parser.set_defaults(handler=run)


def run(args) -> int:
    config = load_config(args.config)
    grid = config.sweep_grid
    if args.ablation_epsilons:
        grid = ablation_grid(config.decoupler, args.ablation_epsilons, args.ablation_seeds or [args.seed],
                             config.mechanism.name)
        config = config.model_copy(update={"sweep_grid": grid})
    data = load_dataset(args.data)
    points, failures = tradeoff_sweep(grid, config, data, args.seed, args.jobs)
    prepare_output(args.out)
    write_points_csv(os.path.join(args.out, POINTS), points)
    write_failures(os.path.join(args.out, FAILURES), failures)
    echo_config(args.out, config, seed=args.seed, jobs=args.jobs)
    print(f"points={len(points)} failures={len(failures)}")
    return 0
