import numpy as np

from mechanisms.base import SanitizationMechanism


def suppress(z_s) -> np.ndarray:
    """Replace z_S by the zero vector of the same shape."""
    return np.zeros_like(np.asarray(z_s, dtype=np.float64))


class SuppressionMechanism(SanitizationMechanism):
    tag = "suppress"

    def replace_sensitive(self, z_s, labels, rng):
        return suppress(z_s), None
