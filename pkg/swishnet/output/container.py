"""Flat binary parameter container.

Layout (little endian)::

    b"SWNN"
    u32 version            1 = float32 scalars, 2 = float64 scalars
    repeated until EOF:
        u32 name length, utf-8 name
        u32 rank, rank x u32 extents
        raw scalars in row-major order
"""
from pathlib import Path
import struct

import numpy as np

from ..core.error_codes import ErrorCode, get_error_message
from ..core.exceptions import DataFormatError, dimension_mismatch
from ..nn import Model
from ..tensor import Precision

MAGIC = b"SWNN"
VERSION_SINGLE = 1
VERSION_DOUBLE = 2
_SCALARS = {VERSION_SINGLE: np.dtype("<f4"), VERSION_DOUBLE: np.dtype("<f8")}


def tensor_name(layer_index: int, parameter: str) -> str:
    return f"layers.{layer_index}.{parameter}"


def encode_tensors(tensors: dict[str, np.ndarray], precision: Precision) -> bytes:
    version = VERSION_SINGLE if precision is Precision.SINGLE else VERSION_DOUBLE
    scalar = _SCALARS[version]
    parts = [MAGIC, struct.pack("<I", version)]
    for name, value in tensors.items():
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<I", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack(f"<I{value.ndim}I", value.ndim, *value.shape))
        parts.append(np.ascontiguousarray(value, dtype=scalar).tobytes())
    return b"".join(parts)


def decode_tensors(data: bytes, source: str | Path = "<bytes>") -> dict[str, np.ndarray]:
    def truncated(expected: int) -> DataFormatError:
        return DataFormatError(
            get_error_message(ErrorCode.TRUNCATED_FILE, path=source, expected=expected, found=len(data)),
            error_code=ErrorCode.TRUNCATED_FILE,
        )

    if len(data) < 8:
        raise truncated(8)
    if data[:4] != MAGIC:
        raise DataFormatError(
            get_error_message(ErrorCode.BAD_MAGIC, path=source, observed=data[:4].hex(" "), expected=MAGIC.hex(" "))
        )
    (version,) = struct.unpack_from("<I", data, 4)
    if version not in _SCALARS:
        raise DataFormatError(f"Unsupported container version {version} in {source}", error_code=ErrorCode.BAD_MAGIC)
    scalar = _SCALARS[version]
    tensors: dict[str, np.ndarray] = {}
    offset = 8
    while offset < len(data):
        if offset + 4 > len(data):
            raise truncated(offset + 4)
        (name_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        if offset + name_len + 4 > len(data):
            raise truncated(offset + name_len + 4)
        name = data[offset : offset + name_len].decode("utf-8")
        offset += name_len
        (rank,) = struct.unpack_from("<I", data, offset)
        offset += 4
        if offset + 4 * rank > len(data):
            raise truncated(offset + 4 * rank)
        shape = struct.unpack_from(f"<{rank}I", data, offset)
        offset += 4 * rank
        nbytes = int(np.prod(shape, dtype=np.int64)) * scalar.itemsize
        if offset + nbytes > len(data):
            raise truncated(offset + nbytes)
        tensors[name] = np.frombuffer(data, dtype=scalar, count=nbytes // scalar.itemsize, offset=offset).reshape(shape)
        offset += nbytes
    return tensors


def save_model(path: Path | str, model: Model) -> Path:
    path = Path(path)
    tensors = {tensor_name(index, name): value for index, name, value in model.parameters()}
    path.write_bytes(encode_tensors(tensors, model.precision))
    return path


def load_model(path: Path | str, model: Model) -> Model:
    """Copy stored tensors into a freshly built model of the same architecture."""
    path = Path(path)
    if not path.is_file():
        raise DataFormatError(
            get_error_message(ErrorCode.MISSING_INPUT_FILE, path=path), error_code=ErrorCode.MISSING_INPUT_FILE
        )
    tensors = decode_tensors(path.read_bytes(), path)
    expected = {tensor_name(index, name) for index, name, _ in model.parameters()}
    if set(tensors) != expected:
        missing = sorted(expected - set(tensors))
        extra = sorted(set(tensors) - expected)
        raise DataFormatError(
            f"{path} does not match {model.name}: missing {missing[:3]}, unexpected {extra[:3]}",
            error_code=ErrorCode.COUNT_MISMATCH,
        )
    for index, name, value in model.parameters():
        stored = tensors[tensor_name(index, name)]
        if stored.shape != value.shape:
            raise dimension_mismatch(tensor_name(index, name), stored.shape, value.shape)
        model.layers[index].params[name] = stored.astype(model.precision.dtype)
    return model
