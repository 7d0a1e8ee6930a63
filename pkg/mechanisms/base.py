"""
Sanitization mechanisms.

Every mechanism replaces the sensitive latent block of a batch (or, for the
pixel-noise baseline, perturbs the samples directly). Pick one by tag:

    mechanism = get_mechanism("dp-sample", budget)
    z_s_tilde, y_s_tilde = mechanism.replace_sensitive(z_s, y_s, rng)
"""

from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np

from core.rng import RngStream
from schemas.budget import PrivacyBudget
from utils.errors import MechanismError, UnsupportedMechanismError


class SanitizationMechanism(ABC):
    """Abstract base class for sanitization mechanisms"""

    tag: str = ""
    uses_budget: bool = False
    emits_labels: bool = False
    latent_space: bool = True

    @abstractmethod
    def replace_sensitive(self, z_s: np.ndarray, labels: np.ndarray,
                          rng: RngStream) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        """
        Replace every row of z_S.

        Args:
            z_s: n × k sensitive latent block
            labels: the n sensitive class ids of the same rows
            rng: stream owned by this call

        Returns:
            (z̃_S, Ỹ_S) where Ỹ_S is None unless the mechanism draws labels
        """

    def budget_used(self) -> Optional[dict]:
        """Privacy parameters consumed, or None when the mechanism spends no ε."""
        return None

    def parameters(self) -> dict:
        return {}


def require_epsilon(budget: Optional[PrivacyBudget], tag: str) -> PrivacyBudget:
    if budget is None or budget.epsilon is None:
        raise MechanismError(f"mechanism {tag!r} needs a privacy budget ε")
    return budget


def get_mechanism(name: str, budget: Optional[PrivacyBudget] = None, pixel_sigma: float = 0.1,
                  class_means=None) -> SanitizationMechanism:
    """
    Factory function for the mechanism registered under ``name``.

    ``class_means`` is only used by interpolation.
    """
    from mechanisms.interpolation import InterpolationMechanism
    from mechanisms.dp_sampling import DPSamplingMechanism
    from mechanisms.obfuscation import ObfuscationMechanism
    from mechanisms.pixel_noise import PixelNoiseMechanism
    from mechanisms.suppression import SuppressionMechanism

    if name == "suppress":
        return SuppressionMechanism()
    if name == "obfuscate":
        return ObfuscationMechanism(require_epsilon(budget, name))
    if name == "dp-sample":
        return DPSamplingMechanism(require_epsilon(budget, name))
    if name == "pixel-noise":
        return PixelNoiseMechanism(pixel_sigma)
    if name == "interpolate":
        if class_means is None:
            raise MechanismError("interpolation needs the per-class mean latents")
        return InterpolationMechanism(class_means)
    raise UnsupportedMechanismError(f"unknown mechanism {name!r}")
