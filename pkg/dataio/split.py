import math

import numpy as np

from core.rng import RngStream
from models.dataset import LabeledDataset
from utils.errors import ParameterError
from utils.hash import stream_key


def split_indices(n: int, fraction: float, rng: RngStream):
    """Shuffle 0..n-1 and cut after ⌊fraction·n⌋ rows."""
    if not 0.0 < fraction < 1.0:
        raise ParameterError(f"split fraction must lie in (0, 1), got {fraction}")
    order = rng.permutation(n)
    cut = math.floor(fraction * n)
    return order[:cut], order[cut:]


def split_aux_sensitive(data: LabeledDataset, fraction: float, seed: int):
    """Disjoint (D_aux, D_A) partition of the rows, sizes ⌊fraction·N⌋ and the remainder."""
    aux_rows, rest_rows = split_indices(data.n, fraction, RngStream(seed, stream_key("split-aux")))
    return data.subset(aux_rows), data.subset(rest_rows)


def holdout_split(n: int, test_fraction: float, rng: RngStream):
    """(train rows, test rows) with at least one row on each side when n >= 2."""
    train, test = split_indices(n, 1.0 - test_fraction, rng)
    if n >= 2 and len(test) == 0:
        train, test = train[:-1], train[-1:]
    if n >= 2 and len(train) == 0:
        train, test = test[:1], test[1:]
    return np.sort(train), np.sort(test)
