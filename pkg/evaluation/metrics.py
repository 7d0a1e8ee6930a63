"""Leakage, prior accuracy, pareto front and the normalised area under it."""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from utils.errors import ParameterError


def _check_accuracy(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must lie in [0, 1], got {value}")


def leakage(attacker_acc: float, prior_acc: float) -> float:
    """Attacker accuracy minus the uninformed (prior) accuracy; may be negative."""
    _check_accuracy("attacker accuracy", attacker_acc)
    _check_accuracy("prior accuracy", prior_acc)
    return attacker_acc - prior_acc


def prior_accuracy(train_labels, test_labels) -> float:
    """Accuracy on ``test_labels`` of always guessing the majority class of ``train_labels``."""
    train_labels = np.asarray(train_labels, dtype=np.int64)
    test_labels = np.asarray(test_labels, dtype=np.int64)
    if test_labels.size == 0:
        return 0.0
    if train_labels.size == 0:
        train_labels = test_labels
    majority = np.bincount(train_labels).argmax()
    return float(np.mean(test_labels == majority))


def coordinates(point) -> Tuple[float, float]:
    if hasattr(point, "leakage") and hasattr(point, "utility"):
        return float(point.leakage), float(point.utility)
    leak, util = point
    return float(leak), float(util)


def pareto_front(points: Sequence) -> List:
    """
    Undominated points under (minimise leakage, maximise utility), in
    ascending leakage. Among equal-leakage points only the highest utility
    survives; exact duplicates collapse to the first.

    Points are (leakage, utility) pairs or objects with those attributes.
    """
    indexed = sorted(enumerate(points), key=lambda item: (coordinates(item[1])[0], -coordinates(item[1])[1], item[0]))
    front, best = [], -np.inf
    for _, point in indexed:
        util = coordinates(point)[1]
        if util > best:
            front.append(point)
            best = util
    return front


def auc(points: Sequence, chance_leakage: float, chance_utility: float) -> float:
    """
    Area under the pareto curve extended by the anchors (chance_leakage,
    chance_utility) and (1, max utility), over [chance_leakage, 1], divided
    by 1 − chance_leakage.
    """
    if chance_leakage >= 1.0:
        raise ParameterError(f"chance leakage must be below 1, got {chance_leakage}")
    coords = sorted(coordinates(p) for p in points)
    top = max((u for _, u in coords), default=chance_utility)
    xs = [chance_leakage] + [leak for leak, _ in coords] + [1.0]
    ys = [chance_utility] + [u for _, u in coords] + [top]
    xs = np.clip(np.array(xs), chance_leakage, 1.0)
    return float(trapezoid(ys, xs) / (1.0 - chance_leakage))


@dataclass
class TradeoffCurve:
    points: List
    pareto: List = field(default_factory=list)
    auc: float = 0.0


def tradeoff_curve(points: Sequence, chance_leakage: float, chance_utility: float) -> TradeoffCurve:
    front = pareto_front(points)
    return TradeoffCurve(list(points), front, auc(front, chance_leakage, chance_utility))
