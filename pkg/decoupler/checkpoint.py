"""
Decoupler checkpoint codec.

Layout: magic ``SNZD``, one version byte, a u32 header length, a UTF-8 JSON
header (config, input width, sensitive attributes, class counts, blob
lengths), then the SANZ blobs of encoder, decoder, aligners and
adversaries in that order.
"""

import json
import os
import struct

from models.params import DecouplerParams
from nets.serialization import decode_network, encode_network
from schemas.decoupler import DecouplerConfig
from utils.errors import StorageError, TruncatedBlobError, UnsupportedVersionError
from utils.hash import sha256_hex

MAGIC = b"SNZD"
VERSION = 1


def encode_checkpoint(params: DecouplerParams) -> bytes:
    specs = params.specs
    pairs = [(specs.encoder, params.encoder), (specs.decoder, params.decoder)]
    pairs += list(zip(specs.aligners, params.aligners)) + list(zip(specs.adversaries, params.adversaries))
    blobs = [encode_network(spec, p) for spec, p in pairs]
    header = {
        "config": params.config.model_dump(mode="json"),
        "input_dim": params.input_dim,
        "sensitive_attributes": list(params.sensitive_attributes),
        "class_counts": list(params.class_counts),
        "blob_lengths": [len(b) for b in blobs],
    }
    raw = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return MAGIC + struct.pack("<BI", VERSION, len(raw)) + raw + b"".join(blobs)


def decode_checkpoint(blob: bytes) -> DecouplerParams:
    if len(blob) < 9:
        raise TruncatedBlobError("checkpoint shorter than its fixed header")
    if blob[:4] != MAGIC:
        raise StorageError("not a decoupler checkpoint (bad magic)")
    version, header_len = struct.unpack("<BI", blob[4:9])
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported checkpoint version {version}")
    if 9 + header_len > len(blob):
        raise TruncatedBlobError("checkpoint header truncated")
    try:
        header = json.loads(blob[9:9 + header_len].decode("utf-8"))
        config = DecouplerConfig.model_validate(header["config"])
        missing = {"input_dim", "sensitive_attributes", "class_counts", "blob_lengths"} - set(header)
        if missing:
            raise KeyError(", ".join(sorted(missing)))
    except (ValueError, KeyError) as exc:
        raise StorageError(f"corrupt checkpoint header: {exc}") from exc

    offset, nets = 9 + header_len, []
    for expected in header["blob_lengths"]:
        _, params, end = decode_network(blob, offset)
        if end - offset != expected:
            raise StorageError("checkpoint blob length does not match its header")
        nets.append(params)
        offset = end
    if offset != len(blob):
        raise StorageError(f"{len(blob) - offset} trailing bytes after checkpoint")
    heads = len(header["class_counts"])
    if len(nets) != 2 + 2 * heads:
        raise StorageError(f"checkpoint holds {len(nets)} networks, expected {2 + 2 * heads}")
    try:
        return DecouplerParams(
            config=config,
            input_dim=int(header["input_dim"]),
            sensitive_attributes=tuple(header["sensitive_attributes"]),
            class_counts=tuple(header["class_counts"]),
            encoder=nets[0],
            decoder=nets[1],
            aligners=tuple(nets[2:2 + heads]),
            adversaries=tuple(nets[2 + heads:]),
        )
    except ValueError as exc:
        raise StorageError(f"checkpoint networks do not match its config: {exc}") from exc


def save_checkpoint(path, params: DecouplerParams) -> str:
    """Write atomically and return the sha256 of the written bytes."""
    blob = encode_checkpoint(params)
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as f:
        f.write(blob)
    os.replace(tmp, path)
    return sha256_hex(blob)


def load_checkpoint(path) -> DecouplerParams:
    try:
        with open(path, "rb") as f:
            blob = f.read()
    except OSError as exc:
        raise StorageError(f"cannot read checkpoint {path}: {exc}") from exc
    return decode_checkpoint(blob)
