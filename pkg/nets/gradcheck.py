from typing import Callable, List

import numpy as np

from core.rng import RngStream
from nets.autodiff import value_and_grad


def finite_difference_check(loss_fn: Callable, param_sets: List, rng: RngStream,
                            coordinates: int = 100, h: float = 1e-5, floor: float = 1e-5) -> float:
    """
    Compare reverse-mode gradients with central differences on randomly
    chosen coordinates. Returns the worst relative error seen.

    ``loss_fn`` takes one ParamTensors per ParamSet and returns a scalar Tensor.
    """
    _, grads = value_and_grad(loss_fn, *param_sets)
    slots = [(i, j) for i, params in enumerate(param_sets) for j in range(len(params.arrays()))]
    sizes = np.array([param_sets[i].arrays()[j].size for i, j in slots], dtype=np.float64)
    worst = 0.0
    for _ in range(coordinates):
        slot = int(rng.choice(len(slots), p=sizes / sizes.sum()))
        i, j = slots[slot]
        arrays = param_sets[i].arrays()
        flat_index = int(rng.integers(0, arrays[j].size))

        def shifted(delta):
            bumped = [a.copy() for a in arrays]
            bumped[j].flat[flat_index] += delta
            sets = list(param_sets)
            sets[i] = param_sets[i].with_arrays(bumped)
            value, _ = value_and_grad(loss_fn, *sets)
            return value

        numeric = (shifted(h) - shifted(-h)) / (2.0 * h)
        analytic = grads[i].arrays()[j].flat[flat_index]
        scale = max(abs(numeric), abs(analytic), floor)
        worst = max(worst, abs(numeric - analytic) / scale)
    return worst
