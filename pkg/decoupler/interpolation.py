"""Latent-interpolation baseline: shift z_S from the mean of class i to the mean of class j."""

from typing import Dict, Optional

import numpy as np

from core.rng import RngStream
from decoupler.model import encode_batch
from models.dataset import LabeledDataset
from models.latent import LatentCode
from models.params import DecouplerParams
from utils.errors import MechanismError, ShapeError, UnknownClassError

ClassMeans = Dict[int, np.ndarray]


def class_means_from_latents(z_s: np.ndarray, labels: np.ndarray, n_classes: int,
                             attribute: str = "sensitive") -> ClassMeans:
    z_s = np.asarray(z_s, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if z_s.ndim != 2 or labels.shape != (z_s.shape[0],):
        raise ShapeError(f"latents {z_s.shape} do not match labels {labels.shape}")
    means = {}
    for c in range(n_classes):
        members = labels == c
        if not members.any():
            raise MechanismError(f"class {c} of {attribute!r} has no members; its mean latent is undefined")
        means[c] = z_s[members].mean(axis=0)
    return means


def class_mean_latents(params: DecouplerParams, data: LabeledDataset, attribute: Optional[str] = None) -> ClassMeans:
    """Mean of z_S (posterior-mean encoding) over the members of every sensitive class."""
    attribute = attribute or params.sensitive_attributes[0]
    code = encode_batch(params, data.X)
    return class_means_from_latents(code.z_s, data.column(attribute),
                                    data.attribute(attribute).cardinality, attribute)


def _mean(means: ClassMeans, c) -> np.ndarray:
    try:
        return means[int(c)]
    except (KeyError, TypeError, ValueError):
        raise UnknownClassError(f"unknown class id {c!r}; known classes are {sorted(means)}") from None


def interpolate_sanitize(z: LatentCode, i, j, means: ClassMeans) -> LatentCode:
    """z̃_S = z_S − mean_i + mean_j, z_NS untouched."""
    source, target = _mean(means, i), _mean(means, j)
    if source.shape != (z.k,):
        raise ShapeError(f"class means have width {source.shape[0]}, latent split is k={z.k}")
    return z.with_sensitive(z.z_s - source + target)


def interpolate_batch(z_s: np.ndarray, labels: np.ndarray, means: ClassMeans, rng: RngStream):
    """
    Shift every row from its own class mean to a target class drawn
    uniformly (own class included) per row. Returns (z̃_S, targets).
    """
    z_s = np.asarray(z_s, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    classes = np.array(sorted(means), dtype=np.int64)
    targets = classes[rng.integers(0, len(classes), size=z_s.shape[0])]
    table = np.stack([means[int(c)] for c in classes]) if len(classes) else np.zeros((0, z_s.shape[1]))
    index = {int(c): i for i, c in enumerate(classes)}
    try:
        source_rows = np.array([index[int(c)] for c in labels], dtype=np.int64)
    except KeyError as exc:
        raise UnknownClassError(f"unknown class id {exc.args[0]}; known classes are {sorted(means)}") from None
    target_rows = np.searchsorted(classes, targets)
    if z_s.shape[0] == 0:
        return z_s.copy(), targets
    return z_s - table[source_rows] + table[target_rows], targets
