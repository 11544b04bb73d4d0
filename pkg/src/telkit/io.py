"""Dataset files: the TELD binary format and PPM/PGM image directories.

TELD layout (all integers little-endian unsigned 32-bit):

    magic "TELD" | version | sample_count | order N | N dim sizes |
    dtype code (1 = little-endian float64) |
    per sample: label | prod(dims) float64 scalars, column-major

Image ingestion walks one subdirectory per class, decoding binary PPM
(P6) and PGM (P5) files with maxval 255 into (height, width, channels)
tensors scaled to [0, 1].  Subdirectories and files are visited in
lexicographic order so sample order is deterministic.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Callable

import numpy as np

from .ensemble import LabeledTensorDataset
from .tensor import DenseTensor

__all__ = [
    "TeldError",
    "BadMagicError",
    "UnsupportedVersionError",
    "UnsupportedDtypeError",
    "TruncatedFileError",
    "ShapeError",
    "ImageFormatError",
    "save_tensor_dataset",
    "load_tensor_dataset",
    "decode_ppm",
    "load_ppm_dir",
]

TELD_MAGIC = b"TELD"
TELD_VERSION = 1
TELD_DTYPE_F64 = 1
_MAX_ELEMENTS = 1 << 31  # refuse absurd shapes before allocating


class TeldError(ValueError):
    """Base class for malformed TELD files."""


class BadMagicError(TeldError):
    pass


class UnsupportedVersionError(TeldError):
    pass


class UnsupportedDtypeError(TeldError):
    pass


class TruncatedFileError(TeldError):
    pass


class ShapeError(TeldError):
    pass


class ImageFormatError(ValueError):
    """Unsupported or malformed PPM/PGM content."""


def save_tensor_dataset(data: LabeledTensorDataset, path: str | Path) -> None:
    """Write a dataset in TELD format (lossless round-trip)."""
    if data.n_samples == 0:
        raise ValueError("refusing to save an empty dataset")
    shape = data.shape
    with open(path, "wb") as handle:
        handle.write(TELD_MAGIC)
        handle.write(struct.pack("<III", TELD_VERSION, data.n_samples, len(shape)))
        handle.write(struct.pack(f"<{len(shape)}I", *shape))
        handle.write(struct.pack("<I", TELD_DTYPE_F64))
        for x, label in zip(data.samples, data.labels):
            handle.write(struct.pack("<I", int(label)))
            handle.write(x.data.astype("<f8").tobytes())


class _Reader:
    """Byte cursor that reports the offset of a short read."""

    def __init__(self, blob: bytes):
        self.blob = blob
        self.offset = 0

    def take(self, count: int, what: str) -> bytes:
        if self.offset + count > len(self.blob):
            raise TruncatedFileError(
                f"unexpected end of file at byte {len(self.blob)} "
                f"(needed {count} bytes for {what} at offset {self.offset})"
            )
        chunk = self.blob[self.offset : self.offset + count]
        self.offset += count
        return chunk

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]


def load_tensor_dataset(path: str | Path) -> LabeledTensorDataset:
    """Read a TELD file; every malformation has its own error class."""
    reader = _Reader(Path(path).read_bytes())
    magic = reader.take(4, "magic")
    if magic != TELD_MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {TELD_MAGIC!r}")
    version = reader.u32("version")
    if version != TELD_VERSION:
        raise UnsupportedVersionError(
            f"unsupported format version {version} (supported: {TELD_VERSION})"
        )
    n_samples = reader.u32("sample count")
    order = reader.u32("order")
    if n_samples == 0 or order == 0:
        raise ShapeError(
            f"dataset must have samples and order >= 1, "
            f"got {n_samples} samples of order {order}"
        )
    dims = [reader.u32(f"dimension {n}") for n in range(order)]
    if any(d == 0 for d in dims):
        raise ShapeError(f"zero dimension in shape {tuple(dims)}")
    n_elements = 1
    for d in dims:
        n_elements *= d
        if n_elements > _MAX_ELEMENTS:
            raise ShapeError(
                f"shape {tuple(dims)} overflows the element limit "
                f"{_MAX_ELEMENTS}"
            )
    dtype = reader.u32("dtype code")
    if dtype != TELD_DTYPE_F64:
        raise UnsupportedDtypeError(
            f"unsupported dtype code {dtype} (supported: {TELD_DTYPE_F64})"
        )
    samples = []
    labels = []
    for m in range(n_samples):
        labels.append(reader.u32(f"label of sample {m}"))
        payload = reader.take(8 * n_elements, f"payload of sample {m}")
        values = np.frombuffer(payload, dtype="<f8")
        samples.append(DenseTensor(dims, values))
    return LabeledTensorDataset(samples, np.array(labels, dtype=np.int64))


def _ppm_tokens(blob: bytes):
    """Yield header tokens, skipping whitespace and # comments.

    Returns (token, offset just past the single whitespace byte that
    terminated it).
    """
    i = 0
    while True:
        while i < len(blob) and blob[i : i + 1].isspace():
            i += 1
        if i < len(blob) and blob[i] == ord("#"):
            while i < len(blob) and blob[i] != ord("\n"):
                i += 1
            continue
        start = i
        while i < len(blob) and not blob[i : i + 1].isspace():
            i += 1
        if start == i:
            raise ImageFormatError("truncated header")
        yield blob[start:i], i + 1
        i += 1


def decode_ppm(blob: bytes) -> DenseTensor:
    """Decode one binary P6 (RGB) or P5 (gray) image to a [0, 1] tensor.

    The result has shape (height, width, channels) with channels 3 for
    P6 and 1 for P5.  Only maxval 255 is supported.
    """
    tokens = _ppm_tokens(blob)
    try:
        magic, _ = next(tokens)
        if magic not in (b"P5", b"P6"):
            raise ImageFormatError(
                f"unsupported image variant {magic!r} (binary P5/P6 only)"
            )
        channels = 3 if magic == b"P6" else 1
        width_tok, _ = next(tokens)
        height_tok, _ = next(tokens)
        maxval_tok, raster_start = next(tokens)
    except StopIteration:
        raise ImageFormatError("truncated header") from None
    try:
        width, height, maxval = int(width_tok), int(height_tok), int(maxval_tok)
    except ValueError:
        raise ImageFormatError("non-numeric header field") from None
    if width < 1 or height < 1:
        raise ImageFormatError(f"invalid image size {width}x{height}")
    if maxval != 255:
        raise ImageFormatError(f"unsupported maxval {maxval} (255 only)")
    expected = width * height * channels
    raster = blob[raster_start : raster_start + expected]
    if len(raster) < expected:
        raise ImageFormatError(
            f"raster truncated: expected {expected} bytes, got {len(raster)}"
        )
    pixels = np.frombuffer(raster, dtype=np.uint8).astype(np.float64) / 255.0
    array = pixels.reshape((height, width, channels))  # row-major raster
    return DenseTensor.from_array(array)


def load_ppm_dir(
    root_path: str | Path,
    label_rule: Callable[[str], int] | None = None,
) -> LabeledTensorDataset:
    """Ingest a directory of class subdirectories of P5/P6 images.

    ``label_rule`` maps a subdirectory name to its class index; the
    default assigns 0..K-1 to the lexicographically sorted names.
    Images of differing sizes are rejected.
    """
    root = Path(root_path)
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise ImageFormatError(f"no class subdirectories under {root}")
    if label_rule is None:
        order = {p.name: k for k, p in enumerate(class_dirs)}
        label_rule = order.__getitem__
    samples = []
    labels = []
    shape = None
    for class_dir in class_dirs:
        files = sorted(p for p in class_dir.iterdir() if p.is_file())
        if not files:
            raise ImageFormatError(f"empty class directory {class_dir}")
        label = int(label_rule(class_dir.name))
        for file in files:
            tensor = decode_ppm(file.read_bytes())
            if shape is None:
                shape = tensor.shape
            elif tensor.shape != shape:
                raise ImageFormatError(
                    f"inconsistent image sizes: {file} is {tensor.shape}, "
                    f"expected {shape}"
                )
            samples.append(tensor)
            labels.append(label)
    return LabeledTensorDataset(samples, np.array(labels, dtype=np.int64))
