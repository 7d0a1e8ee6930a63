"""
Loss terms of the joint decoupler objective.

    L1  mean over the batch of [Σ_pixels BCE(x, decoder(z)) + β·KL(q(z|x) || N(0, I))]
    L2  Σ over sensitive attributes of the aligner loss on z_S
    L3  dcorr(z_S, z_NS)
    L4  Σ over sensitive attributes of the adversary loss on z_NS

The joint loss minimized by encoder, decoder and aligners is
α1·L1 + α2·L2 + α3·L3 − α4·L4; the adversaries minimize L4 alone.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from models.params import DecouplerParams, ParamTensors
from nets.autodiff import Tensor, bce_with_logits, softmax, softmax_cross_entropy
from nets.network import apply, split_gaussian
from nets.vae import kl_diag_gaussian_rows, reparameterize
from schemas.decoupler import DecouplerConfig, DecouplerSpecs
from stats.dcorr import dcorr_tensor
from utils.errors import MissingLabelsError, ShapeError

TERMS = ("L1", "L2", "L3", "L4")


@dataclass(frozen=True, eq=False)
class Batch:
    """A minibatch: samples (n × D), sensitive labels (n × A) and reparameterization noise (n × m)."""

    X: np.ndarray
    sensitive: Optional[np.ndarray] = None
    noise: Optional[np.ndarray] = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ShapeError(f"a batch needs at least one row, got shape {X.shape}")
        object.__setattr__(self, "X", X)
        if self.sensitive is not None:
            sensitive = np.asarray(self.sensitive, dtype=np.int64)
            if sensitive.ndim == 1:
                sensitive = sensitive[:, None]
            if sensitive.shape[0] != X.shape[0]:
                raise ShapeError("sensitive labels must have one row per sample")
            object.__setattr__(self, "sensitive", sensitive)

    @property
    def size(self) -> int:
        return self.X.shape[0]

    def noise_for(self, m: int) -> np.ndarray:
        if self.noise is None:
            return np.zeros((self.size, m))
        noise = np.asarray(self.noise, dtype=np.float64)
        if noise.shape != (self.size, m):
            raise ShapeError(f"noise of shape {noise.shape} does not match ({self.size}, {m})")
        return noise

    def labels(self) -> np.ndarray:
        if self.sensitive is None:
            raise MissingLabelsError("this loss needs sensitive labels y_S")
        return self.sensitive


def latent(specs: DecouplerSpecs, encoder: ParamTensors, batch: Batch, m: int):
    """(z, mu, logvar) with z = mu + exp(logvar/2)·noise."""
    mu, logvar = split_gaussian(apply(specs.encoder, encoder, batch.X))
    return reparameterize(mu, logvar, batch.noise_for(m)), mu, logvar


def classification_loss(logits: Tensor, labels: np.ndarray, kind: str, p: float) -> Tensor:
    if kind == "cross-entropy":
        return softmax_cross_entropy(logits, labels).mean()
    onehot = np.eye(logits.shape[1])[labels]
    return ((softmax(logits) - onehot).abs() ** p).sum(axis=1).mean()


def reconstruction_term(specs: DecouplerSpecs, decoder: ParamTensors, z: Tensor, mu: Tensor,
                        logvar: Tensor, batch: Batch, beta: float) -> Tensor:
    logits = apply(specs.decoder, decoder, z)
    per_row = bce_with_logits(logits, batch.X).sum(axis=1)
    if beta:
        per_row = per_row + kl_diag_gaussian_rows(mu, logvar) * beta
    return per_row.mean()


def aligner_term(specs: DecouplerSpecs, aligners: Sequence[ParamTensors], z: Tensor, labels: np.ndarray,
                 config: DecouplerConfig) -> Tensor:
    z_s = z[:, :config.k]
    total = None
    for i, (spec, params) in enumerate(zip(specs.aligners, aligners)):
        term = classification_loss(apply(spec, params, z_s), labels[:, i], config.aligner_loss, config.p_norm)
        total = term if total is None else total + term
    return total


def adversary_term(specs: DecouplerSpecs, adversaries: Sequence[ParamTensors], z: Tensor, labels: np.ndarray,
                   config: DecouplerConfig) -> Tensor:
    z_ns = z[:, config.k:]
    total = None
    for i, (spec, params) in enumerate(zip(specs.adversaries, adversaries)):
        term = classification_loss(apply(spec, params, z_ns), labels[:, i], config.adversary_loss, config.p_norm)
        total = term if total is None else total + term
    return total


def decorrelation_term(z: Tensor, k: int) -> Tensor:
    return dcorr_tensor(z[:, :k], z[:, k:])


def _check_labels(params: DecouplerParams, batch: Batch) -> np.ndarray:
    labels = batch.labels()
    if labels.shape[1] != len(params.class_counts):
        raise MissingLabelsError(
            f"batch carries {labels.shape[1]} sensitive columns, decoupler expects {len(params.class_counts)}"
        )
    return labels


def joint_terms(params: DecouplerParams, tensors: Dict[str, object], batch: Batch,
                weights: Optional[Sequence[float]] = None) -> Dict[str, Tensor]:
    """
    All four terms plus the weighted joint loss, built on the given tensors.

    ``tensors`` maps encoder/decoder/aligners/adversaries to ParamTensors.
    Terms whose weight is 0 are evaluated for logging but kept out of the
    joint graph.
    """
    config, specs = params.config, params.specs
    a1, a2, a3, a4 = config.alphas if weights is None else weights
    z, mu, logvar = latent(specs, tensors["encoder"], batch, config.m)
    terms = {"L1": reconstruction_term(specs, tensors["decoder"], z, mu, logvar, batch, config.beta)}
    joint = terms["L1"] * a1
    if batch.sensitive is not None or a2 or a4:
        labels = _check_labels(params, batch)
        terms["L2"] = aligner_term(specs, tensors["aligners"], z, labels, config)
        terms["L4"] = adversary_term(specs, tensors["adversaries"], z, labels, config)
        if a2:
            joint = joint + terms["L2"] * a2
        if a4:
            joint = joint - terms["L4"] * a4
    if batch.size >= 2:
        terms["L3"] = decorrelation_term(z, config.k)
        if a3:
            joint = joint + terms["L3"] * a3
    elif a3:
        raise ShapeError("the decorrelation term needs a batch of at least 2 rows")
    terms["joint"] = joint
    return terms


def constant_tensors(params: DecouplerParams) -> Dict[str, object]:
    return {
        "encoder": params.encoder.as_tensors(),
        "decoder": params.decoder.as_tensors(),
        "aligners": [a.as_tensors() for a in params.aligners],
        "adversaries": [v.as_tensors() for v in params.adversaries],
    }


def main_loss_fn(params: DecouplerParams, batch: Batch, record: Optional[Dict[str, float]] = None):
    """
    Joint loss as a function of (encoder, decoder, *aligners) tensors with the
    adversaries held fixed. Term values are written into ``record``.
    """
    n_heads = len(params.aligners)
    adversaries = [v.as_tensors() for v in params.adversaries]

    def loss_fn(encoder, decoder, *aligners):
        if len(aligners) != n_heads:
            raise ShapeError(f"expected {n_heads} aligner parameter sets, got {len(aligners)}")
        tensors = {"encoder": encoder, "decoder": decoder, "aligners": list(aligners), "adversaries": adversaries}
        terms = joint_terms(params, tensors, batch)
        if record is not None:
            record.clear()
            record.update({name: t.item() for name, t in terms.items()})
        return terms["joint"]

    return loss_fn


def adversary_loss_fn(params: DecouplerParams, z: np.ndarray, labels: np.ndarray):
    """L4 as a function of the adversary tensors, with z held constant."""
    z = Tensor(z)

    def loss_fn(*adversaries):
        return adversary_term(params.specs, adversaries, z, labels, params.config)

    return loss_fn


def full_loss_fn(params: DecouplerParams, batch: Batch, term: str = "joint"):
    """One term (or the joint loss) as a function of every network's tensors, for gradient checks."""
    n = len(params.aligners)

    def loss_fn(encoder, decoder, *heads):
        tensors = {"encoder": encoder, "decoder": decoder,
                   "aligners": list(heads[:n]), "adversaries": list(heads[n:])}
        if term == "joint":
            return joint_terms(params, tensors, batch)["joint"]
        config = params.config
        z, mu, logvar = latent(params.specs, encoder, batch, config.m)
        if term == "L1":
            return reconstruction_term(params.specs, decoder, z, mu, logvar, batch, config.beta)
        if term == "L2":
            return aligner_term(params.specs, tensors["aligners"], z, _check_labels(params, batch), config)
        if term == "L3":
            return decorrelation_term(z, config.k)
        if term == "L4":
            return adversary_term(params.specs, tensors["adversaries"], z, _check_labels(params, batch), config)
        raise ValueError(f"unknown loss term {term!r}")

    return loss_fn


def all_param_sets(params: DecouplerParams) -> List:
    return [params.encoder, params.decoder, *params.aligners, *params.adversaries]


def _evaluate(params: DecouplerParams, batch: Batch, term: str) -> float:
    tensors = [p.as_tensors() for p in all_param_sets(params)]
    return full_loss_fn(params, batch, term)(*tensors).item()


def loss_L1(params: DecouplerParams, batch: Batch, beta: Optional[float] = None) -> float:
    if beta is not None and beta != params.config.beta:
        params = params.replace(config=params.config.model_copy(update={"beta": beta}))
    return _evaluate(params, batch, "L1")


def loss_L2(params: DecouplerParams, batch: Batch) -> float:
    return _evaluate(params, batch, "L2")


def loss_L3(params: DecouplerParams, batch: Batch) -> float:
    if batch.size < 2:
        raise ShapeError("the decorrelation term needs a batch of at least 2 rows")
    return _evaluate(params, batch, "L3")


def loss_L4(params: DecouplerParams, batch: Batch) -> float:
    return _evaluate(params, batch, "L4")


def joint_loss(params: DecouplerParams, batch: Batch) -> float:
    return _evaluate(params, batch, "joint")
