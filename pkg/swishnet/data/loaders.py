"""Parsers for the MNIST IDX and CIFAR binary distributions.

Every loader reads whole files into memory, validates the layout and only
then builds a dataset, so malformed input never yields partial state.

IDX layout (big endian)::

    u32 magic          0x00000803 images / 0x00000801 labels
    u32 count
    u32 rows, u32 cols (images only)
    u8[]  payload      row-major pixels or labels

CIFAR records: CIFAR-10 is ``label, 1024 R, 1024 G, 1024 B`` (3073 bytes);
CIFAR-100 prefixes a coarse label (3074 bytes) and the fine label is used.
"""
import gzip
import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..core.error_codes import ErrorCode, get_error_message
from ..core.exceptions import ConsistencyError, DataFormatError
from ..logger import logger
from ..tensor import Precision
from .datasets import LabeledDataset

MNIST_IMAGE_MAGIC = 0x00000803
MNIST_LABEL_MAGIC = 0x00000801
CIFAR_PLANE = 32 * 32
CIFAR_IMAGE_BYTES = 3 * CIFAR_PLANE
CIFAR10_RECORD = 1 + CIFAR_IMAGE_BYTES
CIFAR100_RECORD = 2 + CIFAR_IMAGE_BYTES

MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}
CIFAR10_FILES = {
    "train": tuple(f"data_batch_{i}.bin" for i in range(1, 6)),
    "test": ("test_batch.bin",),
}
CIFAR100_FILES = {"train": ("train.bin",), "test": ("test.bin",)}


def read_bytes(path: Path | str) -> bytes:
    """Whole-file read; ``.gz`` paths are decompressed transparently."""
    path = Path(path)
    if not path.is_file():
        raise DataFormatError(
            get_error_message(ErrorCode.MISSING_INPUT_FILE, path=path),
            error_code=ErrorCode.MISSING_INPUT_FILE,
            metadata={"path": str(path)},
        )
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as f:
            return f.read()
    return path.read_bytes()


def _scale_pixels(raw: np.ndarray, precision: Precision) -> np.ndarray:
    dtype = precision.dtype
    return raw.astype(dtype) / dtype.type(255.0)


def _parse_idx(path: Path, data: bytes, magic: int, dims: int) -> tuple[tuple[int, ...], np.ndarray]:
    header_size = 4 * (1 + dims)
    if len(data) < header_size:
        raise DataFormatError(
            get_error_message(ErrorCode.TRUNCATED_FILE, path=path, expected=header_size, found=len(data)),
            error_code=ErrorCode.TRUNCATED_FILE,
        )
    (observed,) = struct.unpack(">I", data[:4])
    if observed != magic:
        raise DataFormatError(
            get_error_message(
                ErrorCode.BAD_MAGIC, path=path, observed=data[:4].hex(" "), expected=f"{magic:08x}"
            ),
            metadata={"observed": data[:4].hex(), "expected": f"{magic:08x}"},
        )
    extents = struct.unpack(f">{dims}I", data[4:header_size])
    expected = header_size + int(np.prod(extents, dtype=np.int64))
    if len(data) != expected:
        raise DataFormatError(
            get_error_message(ErrorCode.TRUNCATED_FILE, path=path, expected=expected, found=len(data)),
            error_code=ErrorCode.TRUNCATED_FILE,
        )
    payload = np.frombuffer(data, dtype=np.uint8, offset=header_size)
    return extents, payload


def load_mnist_idx(
    images_path: Path | str, labels_path: Path | str, *, precision: Precision = Precision.SINGLE
) -> LabeledDataset:
    images_path, labels_path = Path(images_path), Path(labels_path)
    (count, rows, cols), pixels = _parse_idx(images_path, read_bytes(images_path), MNIST_IMAGE_MAGIC, 3)
    (label_count,), labels = _parse_idx(labels_path, read_bytes(labels_path), MNIST_LABEL_MAGIC, 1)
    if count != label_count:
        raise ConsistencyError(get_error_message(ErrorCode.COUNT_MISMATCH, images=count, labels=label_count))
    images = _scale_pixels(pixels.reshape(count, 1, rows, cols), precision)
    logger.debug(f"loaded {count} MNIST images {rows}x{cols} from {images_path.name}")
    return LabeledDataset(images, labels.astype(np.int64), 10, "mnist")


def _load_cifar(
    paths: Sequence[Path | str], record: int, label_offset: int, class_count: int, name: str, precision: Precision
) -> LabeledDataset:
    chunks = []
    for path in paths:
        data = read_bytes(path)
        if len(data) % record:
            raise DataFormatError(
                get_error_message(ErrorCode.BAD_RECORD_LENGTH, path=path, length=len(data), record=record),
                error_code=ErrorCode.BAD_RECORD_LENGTH,
            )
        chunks.append(np.frombuffer(data, dtype=np.uint8).reshape(-1, record))
    records = np.concatenate(chunks) if chunks else np.empty((0, record), dtype=np.uint8)
    labels = records[:, label_offset].astype(np.int64)
    if (labels >= class_count).any():
        bad = int(labels[labels >= class_count][0])
        raise DataFormatError(
            f"{name} label byte {bad} is outside [0, {class_count})", error_code=ErrorCode.LABEL_OUT_OF_RANGE
        )
    planes = records[:, record - CIFAR_IMAGE_BYTES :].reshape(-1, 3, 32, 32)
    logger.debug(f"loaded {len(labels)} {name} records from {len(chunks)} file(s)")
    return LabeledDataset(_scale_pixels(planes, precision), labels, class_count, name)


def load_cifar10_bin(paths: Iterable[Path | str], *, precision: Precision = Precision.SINGLE) -> LabeledDataset:
    return _load_cifar(list(paths), CIFAR10_RECORD, 0, 10, "cifar10", precision)


def load_cifar100_bin(paths: Iterable[Path | str], *, precision: Precision = Precision.SINGLE) -> LabeledDataset:
    """Fine (100-class) labels; the coarse byte is skipped."""
    return _load_cifar(list(paths), CIFAR100_RECORD, 1, 100, "cifar100", precision)


def _find(data_dir: Path, filename: str, subdirs: Sequence[str]) -> Path:
    for base in (data_dir, *(data_dir / s for s in subdirs)):
        for candidate in (base / filename, base / f"{filename}.gz"):
            if candidate.is_file():
                return candidate
    # Let read_bytes report the canonical location
    return data_dir / filename


def load_split(
    dataset: str, data_dir: Path | str, split: str, *, precision: Precision = Precision.SINGLE
) -> LabeledDataset:
    """Load the train or test split of a named dataset from its standard file names."""
    data_dir = Path(data_dir)
    match dataset:
        case "mnist":
            images, labels = (_find(data_dir, f, ()) for f in MNIST_FILES[split])
            return load_mnist_idx(images, labels, precision=precision)
        case "cifar10":
            files = [_find(data_dir, f, ("cifar-10-batches-bin",)) for f in CIFAR10_FILES[split]]
            return load_cifar10_bin(files, precision=precision)
        case "cifar100":
            files = [_find(data_dir, f, ("cifar-100-binary",)) for f in CIFAR100_FILES[split]]
            return load_cifar100_bin(files, precision=precision)
    raise DataFormatError(f"Unknown dataset '{dataset}'", error_code=ErrorCode.MISSING_INPUT_FILE)
