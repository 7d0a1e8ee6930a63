"""
Sanitize a dataset: encode at the posterior mean, replace z_S with the
selected mechanism, decode z̃_S ‖ z_NS. The pixel-noise baseline perturbs
the samples instead and records the encoding of the noisy samples.
"""

import logging
import os
from typing import Optional, Union

import numpy as np

from core.rng import RngStream
from decoupler.checkpoint import encode_checkpoint
from decoupler.interpolation import class_mean_latents
from decoupler.model import decode_batch, encode_batch
from dataio.storage import read_blob, read_json, save_dataset, load_dataset, write_blob, write_json
from mechanisms.base import SanitizationMechanism, get_mechanism
from mechanisms.dp_sampling import DPSamplingMechanism
from mechanisms.model_io import load_gaussian_model, save_gaussian_model
from models.dataset import LabeledDataset
from models.params import DecouplerParams
from models.sanitized import SanitizedDataset
from schemas.budget import PrivacyBudget
from utils.errors import SchemaMismatchError, StorageError, UnsupportedVersionError
from utils.hash import sha256_hex

logger = logging.getLogger(__name__)

SIDECAR = "sanitization.json"
SIDECAR_VERSION = 1
LATENTS = "latents.bin"
SYNTHETIC_LABELS = "synthetic_labels.bin"
GAUSSIAN_MODEL = "gaussian_model.bin"


def sanitize_dataset(data: LabeledDataset, dec: DecouplerParams, mechanism: Union[str, SanitizationMechanism],
                     budget: Optional[PrivacyBudget], rng: RngStream, pixel_sigma: float = 0.1,
                     attribute: Optional[str] = None, decoupler_checksum: Optional[str] = None) -> SanitizedDataset:
    if data.input_dim != dec.input_dim:
        raise SchemaMismatchError(
            f"dataset samples have width {data.input_dim}, decoupler expects {dec.input_dim}"
        )
    attribute = attribute or dec.sensitive_attributes[0]
    labels = data.column(attribute)
    if isinstance(mechanism, str):
        means = class_mean_latents(dec, data, attribute) if mechanism == "interpolate" else None
        mechanism = get_mechanism(mechanism, budget, pixel_sigma, means)
    if isinstance(mechanism, DPSamplingMechanism) and mechanism.n_classes is None:
        mechanism.n_classes = data.attribute(attribute).cardinality
    if budget is not None and budget.epsilon is not None and not mechanism.uses_budget:
        logger.warning("mechanism %r spends no privacy budget; ε=%g is ignored", mechanism.tag, budget.epsilon)

    synthetic = None
    if mechanism.latent_space:
        code = encode_batch(dec, data.X)
        z_s, synthetic = mechanism.replace_sensitive(code.z_s, labels, rng.child(f"mechanism/{mechanism.tag}"))
        z_ns = code.z_ns
        X_tilde = decode_batch(dec, np.concatenate([z_s, z_ns], axis=1))
    else:
        X_tilde = mechanism.sanitize_pixels(data.X, rng.child(f"mechanism/{mechanism.tag}"))
        code = encode_batch(dec, X_tilde)
        z_s, z_ns = code.z_s, code.z_ns

    checksum = decoupler_checksum or sha256_hex(encode_checkpoint(dec))
    provenance = {"source": data.provenance, "mechanism": mechanism.tag, **mechanism.parameters()}
    logger.info("sanitized %d samples with %s", data.n, mechanism.tag)
    sanitized = SanitizedDataset(
        data=LabeledDataset(X_tilde.astype(np.float32), data.labels, data.schema, data.sample_shape, provenance),
        z_sensitive=z_s,
        z_non_sensitive=z_ns,
        mechanism=mechanism.tag,
        sensitive_attribute=attribute,
        synthetic_sensitive=synthetic,
        budget_used=mechanism.budget_used(),
        decoupler_checksum=checksum,
        provenance=provenance,
        gaussian_model=getattr(mechanism, "model", None),
    )
    return sanitized


def save_sanitized(sanitized: SanitizedDataset, directory) -> str:
    save_dataset(sanitized.data, directory)
    try:
        latents = np.concatenate([sanitized.z_sensitive, sanitized.z_non_sensitive], axis=1)
        checksums = {LATENTS: write_blob(os.path.join(directory, LATENTS), latents.astype("<f8").tobytes())}
        if sanitized.synthetic_sensitive is not None:
            checksums[SYNTHETIC_LABELS] = write_blob(os.path.join(directory, SYNTHETIC_LABELS),
                                                     sanitized.synthetic_sensitive.astype("<u2").tobytes())
        if sanitized.gaussian_model is not None:
            save_gaussian_model(os.path.join(directory, GAUSSIAN_MODEL), sanitized.gaussian_model)
        write_json(os.path.join(directory, SIDECAR), {
            "version": SIDECAR_VERSION,
            "mechanism": sanitized.mechanism,
            "sensitive_attribute": sanitized.sensitive_attribute,
            "budget_used": sanitized.budget_used,
            "decoupler_checksum": sanitized.decoupler_checksum,
            "k": sanitized.z_sensitive.shape[1],
            "non_sensitive_width": sanitized.z_non_sensitive.shape[1],
            "has_synthetic_labels": sanitized.synthetic_sensitive is not None,
            "checksums": checksums,
            "provenance": sanitized.provenance,
        })
    except OSError as exc:
        raise StorageError(f"cannot write sanitized dataset to {directory}: {exc}") from exc
    return directory


def load_sanitized(directory) -> SanitizedDataset:
    data = load_dataset(directory)
    sidecar = read_json(os.path.join(directory, SIDECAR))
    if sidecar.get("version") != SIDECAR_VERSION:
        raise UnsupportedVersionError(f"unsupported sanitization sidecar version {sidecar.get('version')!r}")
    try:
        k, rest = int(sidecar["k"]), int(sidecar["non_sensitive_width"])
        checksums = sidecar["checksums"]
        raw = read_blob(os.path.join(directory, LATENTS), 8 * data.n * (k + rest), checksums[LATENTS])
        latents = np.frombuffer(raw, dtype="<f8").reshape(data.n, k + rest).astype(np.float64)
        synthetic = None
        if sidecar["has_synthetic_labels"]:
            raw = read_blob(os.path.join(directory, SYNTHETIC_LABELS), 2 * data.n, checksums[SYNTHETIC_LABELS])
            synthetic = np.frombuffer(raw, dtype="<u2").astype(np.int64)
        model_path = os.path.join(directory, GAUSSIAN_MODEL)
        model = load_gaussian_model(model_path) if os.path.exists(model_path) else None
        return SanitizedDataset(
            data=data,
            z_sensitive=latents[:, :k],
            z_non_sensitive=latents[:, k:],
            mechanism=sidecar["mechanism"],
            sensitive_attribute=sidecar["sensitive_attribute"],
            synthetic_sensitive=synthetic,
            budget_used=sidecar["budget_used"],
            decoupler_checksum=sidecar["decoupler_checksum"],
            provenance=sidecar.get("provenance") or {},
            gaussian_model=model,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise StorageError(f"corrupt sanitization sidecar in {directory}: {exc}") from exc
