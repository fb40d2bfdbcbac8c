"""Binary greyscale PGM (P5) export of feature maps."""
from pathlib import Path
from typing import Sequence

import numpy as np

from ..core.exceptions import rank_mismatch
from ..tensor import Tensor


def normalize_channel(channel: np.ndarray) -> np.ndarray:
    """Min-max scale to 0..255; a constant channel maps to all zeros."""
    lo, hi = float(channel.min()), float(channel.max())
    if hi <= lo:
        return np.zeros(channel.shape, dtype=np.uint8)
    scaled = (channel.astype(np.float64) - lo) / (hi - lo)
    return np.rint(scaled * 255.0).astype(np.uint8)


def encode_pgm(pixels: np.ndarray) -> bytes:
    if pixels.ndim != 2:
        raise rank_mismatch("encode_pgm", 2, pixels.shape)
    height, width = pixels.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(pixels, dtype=np.uint8).tobytes()


def decode_pgm_header(data: bytes) -> tuple[int, int, int]:
    """(width, height, maxval) of a P5 file."""
    fields = data.split(maxsplit=4)
    if fields[0] != b"P5":
        raise ValueError("not a binary PGM")
    return int(fields[1]), int(fields[2]), int(fields[3])


def write_feature_maps(out_dir: Path | str, maps: Sequence[tuple[int, Tensor]]) -> list[Path]:
    """One layer{L}_ch{C}.pgm per channel of every [channels, h, w] map."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for layer_index, fmap in maps:
        if fmap.ndim != 3:
            raise rank_mismatch("write_feature_maps", 3, fmap.shape)
        for channel in range(fmap.shape[0]):
            path = out_dir / f"layer{layer_index}_ch{channel}.pgm"
            path.write_bytes(encode_pgm(normalize_channel(fmap[channel])))
            written.append(path)
    return written
