"""
GaussianClassModel files.

Layout: magic ``SGCM``, one version byte, a u32 header length, a JSON header
(p, k, R, ε split, class table) and then W, the class means and the class
covariances as little-endian float64, row-major.
"""

import json
import struct

import numpy as np

from models.gaussian import GaussianClassModel
from utils.errors import StorageError, TruncatedBlobError, UnsupportedVersionError

MAGIC = b"SGCM"
VERSION = 1


def encode_gaussian_model(model: GaussianClassModel) -> bytes:
    header = {
        "p": model.p,
        "k": model.k,
        "clip_radius": model.clip_radius,
        "epsilon_spent": model.epsilon_spent,
        "epsilon_mean": model.epsilon_mean,
        "epsilon_cov": model.epsilon_cov,
        "classes": [
            {"id": c, "count": n, "prior": float(prior)}
            for c, n, prior in zip(model.classes, model.counts, model.priors)
        ],
    }
    raw = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    blobs = [np.ascontiguousarray(a, dtype="<f8").tobytes() for a in (model.W, model.means, model.covariances)]
    return MAGIC + struct.pack("<BI", VERSION, len(raw)) + raw + b"".join(blobs)


def decode_gaussian_model(blob: bytes) -> GaussianClassModel:
    if len(blob) < 9:
        raise TruncatedBlobError("Gaussian model shorter than its fixed header")
    if blob[:4] != MAGIC:
        raise StorageError("not a Gaussian class model (bad magic)")
    version, header_len = struct.unpack("<BI", blob[4:9])
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported Gaussian model version {version}")
    try:
        header = json.loads(blob[9:9 + header_len].decode("utf-8"))
        p, k, table = int(header["p"]), int(header["k"]), header["classes"]
    except (ValueError, KeyError) as exc:
        raise StorageError(f"corrupt Gaussian model header: {exc}") from exc
    c = len(table)
    sizes = [p * k, c * p, c * p * p]
    offset = 9 + header_len
    if offset + 8 * sum(sizes) != len(blob):
        raise TruncatedBlobError(f"Gaussian model payload holds {len(blob) - offset} bytes, expected {8 * sum(sizes)}")
    arrays = []
    for size in sizes:
        arrays.append(np.frombuffer(blob[offset:offset + 8 * size], dtype="<f8").astype(np.float64))
        offset += 8 * size
    try:
        return GaussianClassModel(
            W=arrays[0].reshape(p, k),
            classes=tuple(int(row["id"]) for row in table),
            means=arrays[1].reshape(c, p),
            covariances=arrays[2].reshape(c, p, p),
            priors=np.array([row["prior"] for row in table], dtype=np.float64),
            counts=tuple(int(row["count"]) for row in table),
            clip_radius=float(header["clip_radius"]),
            epsilon_spent=float(header["epsilon_spent"]),
            epsilon_mean=float(header["epsilon_mean"]),
            epsilon_cov=float(header["epsilon_cov"]),
        )
    except (KeyError, ValueError) as exc:
        raise StorageError(f"Gaussian model is inconsistent: {exc}") from exc


def save_gaussian_model(path, model: GaussianClassModel) -> None:
    with open(path, "wb") as f:
        f.write(encode_gaussian_model(model))


def load_gaussian_model(path) -> GaussianClassModel:
    try:
        with open(path, "rb") as f:
            blob = f.read()
    except OSError as exc:
        raise StorageError(f"cannot read Gaussian model {path}: {exc}") from exc
    return decode_gaussian_model(blob)
