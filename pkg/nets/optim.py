from dataclasses import dataclass
from typing import Tuple

import numpy as np

from models.params import ParamSet
from utils.errors import ShapeError


@dataclass(frozen=True, eq=False)
class AdamState:
    first_moment: Tuple[np.ndarray, ...]
    second_moment: Tuple[np.ndarray, ...]
    step: int = 0
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def fresh(cls, params: ParamSet, learning_rate: float = 1e-3, beta1: float = 0.9,
              beta2: float = 0.999, epsilon: float = 1e-8) -> "AdamState":
        zeros = tuple(np.zeros_like(a) for a in params.arrays())
        return cls(zeros, zeros, 0, learning_rate, beta1, beta2, epsilon)


def adam_step(params: ParamSet, grads: ParamSet, state: AdamState) -> Tuple[ParamSet, AdamState]:
    """One bias-corrected Adam update. Returns new objects; inputs are untouched."""
    values, gradients = params.arrays(), grads.arrays()
    if len(values) != len(state.first_moment) or any(
        v.shape != g.shape or v.shape != m.shape
        for v, g, m in zip(values, gradients, state.first_moment)
    ):
        raise ShapeError("parameters, gradients and optimizer buffers must share shapes")
    step = state.step + 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1 ** step
    correction2 = 1.0 - b2 ** step
    new_values, new_m, new_v = [], [], []
    for value, g, m, v in zip(values, gradients, state.first_moment, state.second_moment):
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        new_values.append(value - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon))
        new_m.append(m)
        new_v.append(v)
    new_state = AdamState(tuple(new_m), tuple(new_v), step, state.learning_rate, b1, b2, state.epsilon)
    return params.with_arrays(new_values), new_state
