"""
Global decoupler networks: encoder φ, decoder θ, one aligner u and one
adversary v per sensitive attribute. The aligners only ever see z_S and the
adversaries only ever see z_NS.
"""

from typing import Dict, List, Optional, Sequence

import numpy as np

from core.rng import RngStream
from models.dataset import LabeledDataset
from models.latent import LatentCode
from models.params import DecouplerParams
from nets.autodiff import stable_sigmoid
from nets.network import forward, init_params, split_gaussian
from nets.vae import reparameterize
from schemas.decoupler import DecouplerConfig
from utils.errors import ShapeError

ENCODE_CHUNK = 4096


def init_decoupler(config: DecouplerConfig, input_dim: int, sensitive_attributes: Sequence[str],
                   class_counts: Sequence[int], rng: RngStream) -> DecouplerParams:
    specs = config.network_specs(input_dim, list(class_counts))
    return DecouplerParams(
        config=config,
        input_dim=input_dim,
        sensitive_attributes=tuple(sensitive_attributes),
        class_counts=tuple(int(c) for c in class_counts),
        encoder=init_params(specs.encoder, rng.child("encoder")),
        decoder=init_params(specs.decoder, rng.child("decoder")),
        aligners=tuple(
            init_params(spec, rng.child(f"aligner/{name}"))
            for spec, name in zip(specs.aligners, sensitive_attributes)
        ),
        adversaries=tuple(
            init_params(spec, rng.child(f"adversary/{name}"))
            for spec, name in zip(specs.adversaries, sensitive_attributes)
        ),
    )


def posterior(params: DecouplerParams, X) -> tuple:
    """Posterior mean and log-variance for every row of X."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != params.input_dim:
        raise ShapeError(f"samples of shape {X.shape} do not match decoupler input width {params.input_dim}")
    mus, logvars = [], []
    for start in range(0, max(X.shape[0], 1), ENCODE_CHUNK):
        out = forward(params.specs.encoder, params.encoder, X[start:start + ENCODE_CHUNK])
        mu, logvar = split_gaussian(out)
        mus.append(mu)
        logvars.append(logvar)
    return np.concatenate(mus), np.concatenate(logvars)


def encode_batch(params: DecouplerParams, X, noise=None) -> LatentCode:
    mu, logvar = posterior(params, X)
    if noise is None:
        return LatentCode(mu, params.k)
    return LatentCode(reparameterize(mu, logvar, np.asarray(noise, dtype=np.float64)), params.k)


def encode(params: DecouplerParams, x, noise=None) -> LatentCode:
    """Latent code of a single sample; ``noise=None`` means the posterior mean."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"expected a single flattened sample, got shape {x.shape}")
    batch_noise = None if noise is None else np.asarray(noise, dtype=np.float64)[None, :]
    code = encode_batch(params, x[None, :], batch_noise)
    return LatentCode(code.z[0], params.k)


def decode_batch(params: DecouplerParams, Z) -> np.ndarray:
    """Bernoulli means sigmoid(decoder(z)) for every latent row."""
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[1] != params.m:
        raise ShapeError(f"latents of shape {Z.shape} do not match latent width {params.m}")
    chunks = [
        stable_sigmoid(forward(params.specs.decoder, params.decoder, Z[start:start + ENCODE_CHUNK]))
        for start in range(0, max(Z.shape[0], 1), ENCODE_CHUNK)
    ]
    return np.concatenate(chunks)


def aligner_logits(params: DecouplerParams, z_s, index: int = 0) -> np.ndarray:
    return forward(params.specs.aligners[index], params.aligners[index], z_s)


def adversary_logits(params: DecouplerParams, z_ns, index: int = 0) -> np.ndarray:
    return forward(params.specs.adversaries[index], params.adversaries[index], z_ns)


def aligner_accuracy(params: DecouplerParams, data: LabeledDataset) -> Dict[str, float]:
    """Accuracy of each aligner at reading its attribute from z_S (noise=0 encoding)."""
    code = encode_batch(params, data.X)
    return {
        name: float(np.mean(np.argmax(aligner_logits(params, code.z_s, i), axis=1) == data.column(name)))
        for i, name in enumerate(params.sensitive_attributes)
    }


def adversary_accuracy(params: DecouplerParams, data: LabeledDataset) -> Dict[str, float]:
    code = encode_batch(params, data.X)
    return {
        name: float(np.mean(np.argmax(adversary_logits(params, code.z_ns, i), axis=1) == data.column(name)))
        for i, name in enumerate(params.sensitive_attributes)
    }


def reconstruction_error(params: DecouplerParams, data: LabeledDataset) -> float:
    """Mean squared pixel error of decode(encode(x)) at the posterior mean."""
    if data.n == 0:
        return 0.0
    recon = decode_batch(params, encode_batch(params, data.X).z)
    return float(np.mean((recon - data.X.astype(np.float64)) ** 2))


def sensitive_label_matrix(data: LabeledDataset, names: List[str]) -> np.ndarray:
    return np.stack([data.column(name) for name in names], axis=1)


def class_counts_for(data: LabeledDataset, names: Optional[List[str]]) -> List[int]:
    return [data.attribute(name).cardinality for name in names]
