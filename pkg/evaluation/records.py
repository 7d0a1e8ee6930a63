"""CSV and JSON records emitted by training, evaluation and sweeps."""

import csv
import json
from typing import Iterable, List

from schemas.evaluation import EvaluationReport, TradeoffPoint
from utils.errors import ConfigError, StorageError

POINT_COLUMNS = [
    "config_id", "seed", "epsilon", "alpha1", "alpha2", "alpha3", "alpha4", "beta",
    "mechanism", "leakage_acc", "prior_acc", "leakage_delta", "utility_acc",
]
LOSS_COLUMNS = ["epoch", "L1", "L2", "L3", "L4", "joint"]
HYPERPARAMS = ("alpha1", "alpha2", "alpha3", "alpha4", "beta")


def _number(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def point_row(point: TradeoffPoint) -> dict:
    row = {
        "config_id": point.config_id,
        "seed": str(point.seed),
        "epsilon": _number(point.epsilon),
        "mechanism": point.mechanism,
        "leakage_acc": _number(point.leakage_acc),
        "prior_acc": _number(point.prior_acc),
        "leakage_delta": _number(point.leakage_delta),
        "utility_acc": _number(point.utility_acc),
    }
    for name in HYPERPARAMS:
        row[name] = _number(point.hyperparams.get(name))
    return row


def write_points_csv(path, points: Iterable[TradeoffPoint]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=POINT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for point in points:
            writer.writerow(point_row(point))


def read_points_csv(path) -> List[TradeoffPoint]:
    try:
        with open(path, "r", newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            missing = set(POINT_COLUMNS) - set(reader.fieldnames or [])
            if missing:
                raise ConfigError(f"{path}: missing columns {sorted(missing)}")
            rows = list(reader)
    except OSError as exc:
        raise StorageError(f"cannot read points {path}: {exc}") from exc
    points = []
    for line, row in enumerate(rows, start=2):
        try:
            points.append(TradeoffPoint(
                config_id=row["config_id"],
                seed=int(row["seed"]),
                mechanism=row["mechanism"],
                epsilon=float(row["epsilon"]) if row["epsilon"] else None,
                hyperparams={name: float(row[name]) for name in HYPERPARAMS if row[name]},
                leakage_acc=float(row["leakage_acc"]),
                prior_acc=float(row["prior_acc"]),
                utility_acc=float(row["utility_acc"]),
            ))
        except ValueError as exc:
            raise ConfigError(f"{path} line {line}: {exc}") from exc
    return points


def write_pareto_csv(path, front: Iterable[TradeoffPoint]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["config_id", "seed", "mechanism", "leakage_acc", "utility_acc"])
        for point in front:
            writer.writerow([point.config_id, point.seed, point.mechanism,
                             _number(point.leakage_acc), _number(point.utility_acc)])


def write_loss_csv(path, epochs) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(LOSS_COLUMNS)
        for record in epochs:
            writer.writerow([record.epoch] + [_number(getattr(record, name)) for name in LOSS_COLUMNS[1:]])


def write_report(path, report: EvaluationReport) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report.model_dump(mode="json"), f, sort_keys=True, indent=2)
        f.write("\n")


def write_failures(path, failures) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(failures, f, sort_keys=True, indent=2)
        f.write("\n")
