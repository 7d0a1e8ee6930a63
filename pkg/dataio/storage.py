"""
Dataset directories.

    manifest.json   version, n, sample_shape, dtypes, attribute schema, seed,
                    provenance and the CRC32 of each blob (sorted keys)
    samples.bin     N × H·W·C little-endian float32, row-major
    labels.bin      N × A little-endian uint16, row-major
"""

import json
import logging
import os

import numpy as np

from models.dataset import LabeledDataset
from schemas.data import AttributeSchema
from utils.errors import ChecksumError, StorageError, TruncatedBlobError, UnsupportedVersionError
from utils.hash import crc32

logger = logging.getLogger(__name__)

MANIFEST_VERSION = 1
MANIFEST = "manifest.json"
SAMPLES = "samples.bin"
LABELS = "labels.bin"


def write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, sort_keys=True, indent=2)
        f.write("\n")


def read_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as exc:
        raise StorageError(f"missing {path}") from exc
    except json.JSONDecodeError as exc:
        raise StorageError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc


def write_blob(path, payload: bytes) -> int:
    with open(path, "wb") as f:
        f.write(payload)
    return crc32(payload)


def read_blob(path, expected_size: int, expected_crc: int) -> bytes:
    try:
        with open(path, "rb") as f:
            payload = f.read()
    except FileNotFoundError as exc:
        raise StorageError(f"missing {path}") from exc
    if len(payload) < expected_size:
        raise TruncatedBlobError(f"{path} holds {len(payload)} bytes, expected {expected_size}")
    if len(payload) > expected_size:
        raise StorageError(f"{path} holds {len(payload) - expected_size} unexpected trailing bytes")
    if crc32(payload) != expected_crc:
        raise ChecksumError(f"{path} failed its CRC32 check")
    return payload


def save_dataset(data: LabeledDataset, directory) -> str:
    try:
        os.makedirs(directory, exist_ok=True)
        samples_crc = write_blob(os.path.join(directory, SAMPLES), data.X.astype("<f4").tobytes())
        labels_crc = write_blob(os.path.join(directory, LABELS), data.labels.astype("<u2").tobytes())
        manifest = {
            "version": MANIFEST_VERSION,
            "n": data.n,
            "sample_shape": list(data.sample_shape),
            "dtype": "f32le",
            "label_dtype": "u16le",
            "attributes": [a.model_dump(mode="json") for a in data.schema],
            "seed": data.provenance.get("seed"),
            "provenance": data.provenance,
            "checksums": {SAMPLES: samples_crc, LABELS: labels_crc},
        }
        write_json(os.path.join(directory, MANIFEST), manifest)
    except OSError as exc:
        raise StorageError(f"cannot write dataset to {directory}: {exc}") from exc
    logger.info("saved %d samples to %s", data.n, directory)
    return directory


def load_dataset(directory) -> LabeledDataset:
    manifest = read_json(os.path.join(directory, MANIFEST))
    version = manifest.get("version")
    if version != MANIFEST_VERSION:
        raise UnsupportedVersionError(f"unsupported dataset manifest version {version!r}")
    try:
        n = int(manifest["n"])
        shape = tuple(int(s) for s in manifest["sample_shape"])
        schema = tuple(AttributeSchema.model_validate(a) for a in manifest["attributes"])
        checksums = manifest["checksums"]
        if manifest["dtype"] != "f32le" or manifest["label_dtype"] != "u16le":
            raise ValueError(f"unsupported dtypes {manifest['dtype']}/{manifest['label_dtype']}")
    except (KeyError, TypeError, ValueError) as exc:
        raise StorageError(f"corrupt manifest in {directory}: {exc}") from exc
    width = int(np.prod(shape))
    samples = read_blob(os.path.join(directory, SAMPLES), 4 * n * width, checksums[SAMPLES])
    labels = read_blob(os.path.join(directory, LABELS), 2 * n * len(schema), checksums[LABELS])
    X = np.frombuffer(samples, dtype="<f4").reshape(n, width).astype(np.float32)
    Y = np.frombuffer(labels, dtype="<u2").reshape(n, len(schema)).astype(np.int64)
    try:
        return LabeledDataset(X, Y, schema, shape, manifest.get("provenance") or {})
    except ValueError as exc:
        raise StorageError(f"dataset in {directory} is inconsistent: {exc}") from exc
