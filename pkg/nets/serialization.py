"""
SANZ model blobs.

Layout: magic ``SANZ``, one version byte, the NetworkSpec as length-prefixed
fields (layer widths, activations, output head), then a u64 parameter count
followed by the parameters as little-endian float32 in layer order
(W0 row-major, b0, W1, b1, ...).
"""

import struct

import numpy as np

from models.params import ParamSet
from schemas.nets import NetworkSpec
from utils.errors import StorageError, TruncatedBlobError, UnsupportedVersionError

MAGIC = b"SANZ"
VERSION = 1


def _pack_str(text: str) -> bytes:
    raw = text.encode("utf-8")
    return struct.pack("<H", len(raw)) + raw


class _Reader:
    def __init__(self, blob: bytes, offset: int = 0):
        self.blob = blob
        self.offset = offset

    def take(self, size: int) -> bytes:
        end = self.offset + size
        if end > len(self.blob):
            raise TruncatedBlobError(f"model blob truncated at byte {self.offset} (needed {size} more)")
        chunk = self.blob[self.offset:end]
        self.offset = end
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def string(self) -> str:
        (size,) = self.unpack("<H")
        return self.take(size).decode("utf-8")


def encode_network(spec: NetworkSpec, params: ParamSet) -> bytes:
    if not params.matches(spec):
        raise StorageError(f"parameters do not match network layout {spec.layer_widths}")
    parts = [MAGIC, struct.pack("<B", VERSION)]
    parts.append(struct.pack("<I", len(spec.layer_widths)))
    parts.append(struct.pack(f"<{len(spec.layer_widths)}I", *spec.layer_widths))
    parts.append(struct.pack("<I", len(spec.activations)))
    parts.extend(_pack_str(a) for a in spec.activations)
    parts.append(_pack_str(spec.output_head))
    flat = np.concatenate([a.ravel() for a in params.arrays()]).astype("<f4")
    parts.append(struct.pack("<Q", flat.size))
    parts.append(flat.tobytes())
    return b"".join(parts)


def decode_network(blob: bytes, offset: int = 0):
    """Decode one blob starting at ``offset``; returns (spec, params, end offset)."""
    reader = _Reader(blob, offset)
    if reader.take(4) != MAGIC:
        raise StorageError("not a SANZ model blob (bad magic)")
    (version,) = reader.unpack("<B")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported SANZ version {version}")
    (n_widths,) = reader.unpack("<I")
    widths = list(reader.unpack(f"<{n_widths}I"))
    (n_activations,) = reader.unpack("<I")
    activations = [reader.string() for _ in range(n_activations)]
    head = reader.string()
    try:
        spec = NetworkSpec(layer_widths=widths, activations=activations, output_head=head)
    except ValueError as exc:
        raise StorageError(f"invalid network layout in model blob: {exc}") from exc
    (count,) = reader.unpack("<Q")
    flat = np.frombuffer(reader.take(4 * count), dtype="<f4").astype(np.float64)
    arrays, cursor = [], 0
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        for shape in ((fan_in, fan_out), (fan_out,)):
            size = int(np.prod(shape))
            arrays.append(flat[cursor:cursor + size].reshape(shape))
            cursor += size
    if cursor != count:
        raise StorageError(f"model blob holds {count} parameters, layout needs {cursor}")
    return spec, ParamSet.from_arrays(arrays), reader.offset


def save_network(path, spec: NetworkSpec, params: ParamSet) -> None:
    with open(path, "wb") as f:
        f.write(encode_network(spec, params))


def load_network(path):
    with open(path, "rb") as f:
        blob = f.read()
    spec, params, end = decode_network(blob)
    if end != len(blob):
        raise StorageError(f"{len(blob) - end} trailing bytes after model blob")
    return spec, params
