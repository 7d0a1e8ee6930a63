import numpy as np

from core.rng import RngStream
from core.samplers import sample_laplace
from mechanisms.base import SanitizationMechanism, require_epsilon
from schemas.budget import PrivacyBudget
from utils.errors import MechanismError


def obfuscation_scale(k: int, budget: PrivacyBudget) -> float:
    """Laplace scale k·(b − a)/ε: the ℓ1 diameter of the box [a, b]^k over ε."""
    return k * (budget.clip_high - budget.clip_low) / budget.epsilon


def dp_obfuscate(z_s, budget: PrivacyBudget, rng: RngStream) -> np.ndarray:
    """Clamp every coordinate to [a, b], then add i.i.d. Laplace noise (vector or row batch)."""
    if budget.epsilon is None or not budget.epsilon > 0:
        raise MechanismError(f"obfuscation needs ε > 0, got {budget.epsilon}")
    z_s = np.asarray(z_s, dtype=np.float64)
    clamped = np.clip(z_s, budget.clip_low, budget.clip_high)
    if clamped.size == 0:
        return clamped
    noise = sample_laplace(obfuscation_scale(z_s.shape[-1], budget), clamped.size, rng)
    return clamped + noise.reshape(clamped.shape)


class ObfuscationMechanism(SanitizationMechanism):
    tag = "obfuscate"
    uses_budget = True

    def __init__(self, budget: PrivacyBudget):
        self.budget = require_epsilon(budget, self.tag)
        self._k = None

    def replace_sensitive(self, z_s, labels, rng):
        self._k = np.shape(z_s)[-1]
        return dp_obfuscate(z_s, self.budget, rng), None

    def budget_used(self):
        used = {
            "epsilon": self.budget.epsilon,
            "clip_low": self.budget.clip_low,
            "clip_high": self.budget.clip_high,
        }
        if self._k is not None:
            used["laplace_scale"] = obfuscation_scale(self._k, self.budget)
        return used
