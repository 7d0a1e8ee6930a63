from decoupler.interpolation import ClassMeans, interpolate_batch
from mechanisms.base import SanitizationMechanism


class InterpolationMechanism(SanitizationMechanism):
    """β-VAE baseline: move z_S from its class mean to a uniformly drawn class mean."""

    tag = "interpolate"

    def __init__(self, class_means: ClassMeans):
        self.class_means = class_means

    def replace_sensitive(self, z_s, labels, rng):
        shifted, _ = interpolate_batch(z_s, labels, self.class_means, rng)
        return shifted, None
