"""
Synthetic labeled images.

The sensitive class sets the hue band of a horizontal background gradient.
The utility class sets the foreground shape (disc, bar, ring, cross). The
nuisance factors move the shape, scale it and set its brightness. With
correlation ρ the utility label copies ``sensitive mod C_u`` with
probability ρ instead of being drawn on its own.
"""

import logging

import numpy as np
from matplotlib.colors import hsv_to_rgb

from core.rng import RngStream
from models.dataset import LabeledDataset
from schemas.data import AttributeRole, AttributeSchema, DataConfig, SynthConfig

logger = logging.getLogger(__name__)

GENERATOR = "synthetic-shapes"
GENERATOR_VERSION = 1
SHAPES = ("disc", "bar", "ring", "cross")


def _labels(cfg: SynthConfig, n: int, rng: RngStream):
    sensitive = rng.child("sensitive").choice(cfg.sensitive_classes, size=n, p=cfg.weights("sensitive"))
    utility = rng.child("utility").choice(cfg.utility_classes, size=n, p=cfg.weights("utility"))
    if cfg.correlation > 0:
        coupled = rng.child("coupling").random(n) < cfg.correlation
        utility = np.where(coupled, sensitive % cfg.utility_classes, utility)
    return sensitive.astype(np.int64), utility.astype(np.int64)


def _nuisance(cfg: SynthConfig, n: int, rng: RngStream):
    offsets = np.zeros((n, 2))
    scale = np.ones(n)
    brightness = np.full(n, 0.95)
    if cfg.nuisance_factors >= 1:
        offsets = rng.child("position").uniform(-0.25, 0.25, (n, 2))
    if cfg.nuisance_factors >= 2:
        scale = rng.child("scale").uniform(0.8, 1.2, n)
    if cfg.nuisance_factors >= 3:
        brightness = rng.child("brightness").uniform(0.75, 1.0, n)
    return offsets, scale, brightness


def _shape_masks(utility, offsets, scale, height: int, width: int) -> np.ndarray:
    ys = np.linspace(-1.0, 1.0, height)[None, :, None]
    xs = np.linspace(-1.0, 1.0, width)[None, None, :]
    dx = (xs - offsets[:, 0, None, None]) / scale[:, None, None]
    dy = (ys - offsets[:, 1, None, None]) / scale[:, None, None]
    radius = np.sqrt(dx * dx + dy * dy)
    masks = np.stack([
        radius <= 0.45,
        (np.abs(dx) <= 0.7) & (np.abs(dy) <= 0.2),
        (radius >= 0.3) & (radius <= 0.55),
        ((np.abs(dx) <= 0.15) & (np.abs(dy) <= 0.6)) | ((np.abs(dy) <= 0.15) & (np.abs(dx) <= 0.6)),
    ])
    return masks[utility, np.arange(len(utility))]


def render(cfg: SynthConfig, sensitive, utility, offsets, scale, brightness) -> np.ndarray:
    """Rows of flattened H×W×3 images in [0, 1]."""
    height, width, _ = cfg.image_size
    n = len(sensitive)
    band = 1.0 / cfg.sensitive_classes
    xs = np.linspace(-1.0, 1.0, width)
    hue = (sensitive[:, None] * band + 0.3 * band * xs[None, :]) % 1.0
    hsv = np.empty((n, height, width, 3))
    hsv[..., 0] = hue[:, None, :]
    hsv[..., 1] = 0.7
    hsv[..., 2] = 0.55
    image = hsv_to_rgb(hsv)
    mask = _shape_masks(utility, offsets, scale, height, width)[..., None]
    image = np.where(mask, brightness[:, None, None, None], image)
    return np.clip(image, 0.0, 1.0).reshape(n, -1).astype(np.float32)


def generate_synthetic(cfg: SynthConfig, seed: int) -> LabeledDataset:
    if isinstance(cfg, DataConfig):
        cfg = cfg.synth()
    root = RngStream(seed)
    samples, label_rows = [], []
    for shard, start in enumerate(range(0, cfg.n, cfg.shard_size)):
        n = min(cfg.shard_size, cfg.n - start)
        rng = root.child(f"shard/{shard}")
        sensitive, utility = _labels(cfg, n, rng)
        offsets, scale, brightness = _nuisance(cfg, n, rng)
        samples.append(render(cfg, sensitive, utility, offsets, scale, brightness))
        label_rows.append(np.stack([sensitive, utility], axis=1))
    schema = (
        AttributeSchema(name="sensitive", cardinality=cfg.sensitive_classes, role=AttributeRole.sensitive),
        AttributeSchema(name="utility", cardinality=cfg.utility_classes, role=AttributeRole.non_sensitive),
    )
    provenance = {
        "generator": GENERATOR,
        "generator_version": GENERATOR_VERSION,
        "seed": int(seed),
        "config": cfg.model_dump(mode="json"),
    }
    logger.info("generated %d synthetic samples of shape %s (seed %d)", cfg.n, cfg.image_size, seed)
    return LabeledDataset(np.concatenate(samples), np.concatenate(label_rows), schema, cfg.image_size, provenance)


def regenerate(provenance: dict) -> LabeledDataset:
    """Re-render a synthetic dataset from the provenance stored with it."""
    if provenance.get("generator") != GENERATOR:
        raise ValueError(f"provenance was not written by the {GENERATOR} generator")
    return generate_synthetic(SynthConfig.model_validate(provenance["config"]), provenance["seed"])
