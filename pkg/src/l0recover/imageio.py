"""Grayscale image I/O (binary PGM and PNG) and block-wise processing.

Pixels live in [0, 1] as float64. PGM writing is byte-deterministic:
header "P5\\n<w> <h>\\n255\\n" followed by one rounded byte per pixel
(round half up). RGB PNGs collapse to grayscale with luma weights
0.299 / 0.587 / 0.114 applied in float.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .recovery import SparsityBudget, compress, iht
from .transforms import dct2

LUMA = (0.299, 0.587, 0.114)


@dataclass(eq=False)
class ImageBuffer:
    """2D grayscale pixel grid. Values are clamped to [0, 1] at load time;
    computation results may temporarily leave the range and are clamped only
    when saved."""

    pixels: np.ndarray
    provenance: str = "synthetic"

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=np.float64)
        if pixels.ndim != 2 or min(pixels.shape) < 1:
            raise ValueError(f"pixels must form a 2D grid, got shape {pixels.shape}")
        self.pixels = pixels

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape


def _parse_pgm(data: bytes):
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM (P5) file")
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header")
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace byte separates header from payload
    width, height, maxval = fields
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise ValueError(f"bad PGM dimensions {width}x{height} maxval {maxval}")
    count = width * height
    if maxval < 256:
        raw = np.frombuffer(data, dtype=np.uint8, count=count, offset=pos)
    else:
        raw = np.frombuffer(data, dtype=">u2", count=count, offset=pos)
    if raw.size != count:
        raise ValueError("truncated PGM payload")
    return raw.reshape(height, width).astype(np.float64) / maxval


def _load_png(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        mode = img.mode
        if mode in ("RGBA", "LA", "P"):
            img = img.convert("RGB" if mode in ("RGBA", "P") else "L")
            mode = img.mode
        arr = np.asarray(img)
    if mode == "L":
        return arr.astype(np.float64) / 255.0
    if mode in ("I", "I;16"):
        return arr.astype(np.float64) / 65535.0
    if mode == "RGB":
        channels = arr.astype(np.float64) / 255.0
        return channels @ np.asarray(LUMA)
    raise ValueError(f"unsupported PNG mode {mode!r}")


def load_image(path) -> ImageBuffer:
    """Read a grayscale image (binary PGM or PNG), scaled and clamped to [0, 1]."""
    path = Path(path)
    data = path.read_bytes()
    if data[:2] == b"P5":
        pixels = _parse_pgm(data)
    elif data[:8] == b"\x89PNG\r\n\x1a\n":
        pixels = _load_png(path)
    else:
        raise ValueError(f"{path}: unsupported format (need binary PGM or PNG)")
    return ImageBuffer(np.clip(pixels, 0.0, 1.0), provenance=str(path))


def _quantize(pixels: np.ndarray) -> tuple[np.ndarray, int]:
    clamped = np.clip(pixels, 0.0, 1.0)
    n_clamped = int(np.count_nonzero(clamped != pixels))
    # round half up, not banker's rounding
    return np.floor(clamped * 255.0 + 0.5).astype(np.uint8), n_clamped


def save_image(buffer, path, format: str | None = None) -> int:
    """Write 8-bit grayscale PGM or PNG; returns how many pixels were clamped.

    PGM output is byte-deterministic. The format comes from the argument or
    the file suffix.
    """
    pixels = buffer.pixels if isinstance(buffer, ImageBuffer) else np.asarray(buffer, dtype=np.float64)
    if pixels.ndim != 2:
        raise ValueError("save_image expects a 2D image")
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt not in ("pgm", "png"):
        raise ValueError(f"unsupported format {fmt!r} (pgm or png)")
    quantized, n_clamped = _quantize(pixels)
    if n_clamped:
        warnings.warn(f"{n_clamped} pixels clamped to [0, 1] while saving {path}", stacklevel=2)
    if fmt == "pgm":
        height, width = quantized.shape
        header = f"P5\n{width} {height}\n255\n".encode("ascii")
        path.write_bytes(header + quantized.tobytes())
    else:
        Image.fromarray(quantized, mode="L").save(path, format="PNG")
    return n_clamped


def _pad_to_blocks(pixels: np.ndarray, block_side: int) -> np.ndarray:
    rows, cols = pixels.shape
    pad_r = (-rows) % block_side
    pad_c = (-cols) % block_side
    if pad_r == 0 and pad_c == 0:
        return pixels
    return np.pad(pixels, ((0, pad_r), (0, pad_c)), mode="edge")


def _map_blocks(pixels: np.ndarray, block_side: int, fn) -> np.ndarray:
    padded = _pad_to_blocks(pixels, block_side)
    out = np.empty_like(padded)
    for r in range(0, padded.shape[0], block_side):
        for c in range(0, padded.shape[1], block_side):
            out[r : r + block_side, c : c + block_side] = fn(
                padded[r : r + block_side, c : c + block_side]
            )
    return out[: pixels.shape[0], : pixels.shape[1]]


def blockwise_compress(buffer: ImageBuffer, block_side: int, k_per_block: int) -> ImageBuffer:
    """Project each block onto its top ``k_per_block`` 2D DCT coefficients.

    Non-dividing dimensions are edge-padded for the transform and cropped
    back afterwards.
    """
    if block_side < 1:
        raise ValueError("block_side must be positive")
    k = min(int(k_per_block), block_side * block_side)
    if k < 1:
        raise ValueError("k_per_block must be positive")
    kind = dct2(block_side, block_side)

    def fn(block):
        return compress(block.ravel(), kind, k).reshape(block_side, block_side)

    return ImageBuffer(
        _map_blocks(buffer.pixels, block_side, fn),
        provenance=f"blockwise_compress({buffer.provenance})",
    )


def blockwise_recover(
    buffer: ImageBuffer,
    block_side: int,
    k_per_block: int,
    t_per_block: int,
    T: int = 50,
    mode: str = "jacobi",
) -> ImageBuffer:
    """Run the sparse recovery independently on each block.

    ``t_per_block`` is the per-block corruption budget; how the total budget
    distributes over blocks is the caller's call.
    """
    if block_side < 1:
        raise ValueError("block_side must be positive")
    kind = dct2(block_side, block_side)
    budget = SparsityBudget(k=k_per_block, t=t_per_block, T=T)

    def fn(block):
        report = iht(block.ravel(), kind, budget, mode=mode)
        return report.recovered_signal.reshape(block_side, block_side)

    return ImageBuffer(
        _map_blocks(buffer.pixels, block_side, fn),
        provenance=f"blockwise_recover({buffer.provenance})",
    )
