"""Image and raw-field file formats.

PGM (P2 ASCII / P5 binary, maxval 255 or 65535) maps linearly onto [0, 1]
for grayscale fields.  Unclamped float64 fields travel in a flat .f64 dump:
a 16-byte header (magic "CHUQ", little-endian u32 width, u32 height, four
reserved zero bytes) followed by row-major little-endian float64 values.
"""

import struct

import numpy as np

from .field import ScalarField

__all__ = [
    "read_pgm",
    "write_pgm",
    "load_image",
    "load_mask",
    "read_f64",
    "write_f64",
]

F64_MAGIC = b"CHUQ"
F64_HEADER = 16


def _pgm_tokens(data: bytes):
    """Header tokens, honoring # comments up to end of line."""
    i = 0
    n = len(data)
    while i < n:
        c = data[i:i + 1]
        if c == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < n and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
                j += 1
            yield data[i:j], j
            i = j


def read_pgm(path) -> tuple[np.ndarray, int]:
    """Read a PGM file; returns (raw integer array (h, w), maxval)."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = _pgm_tokens(data)
    try:
        magic, _ = next(tokens)
    except StopIteration:
        raise ValueError(f"{path}: empty file") from None
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"{path}: unsupported magic {magic!r}, expected P2 or P5")
    try:
        width_tok, _ = next(tokens)
        height_tok, _ = next(tokens)
        maxval_tok, end = next(tokens)
        width, height, maxval = int(width_tok), int(height_tok), int(maxval_tok)
    except (StopIteration, ValueError):
        raise ValueError(f"{path}: malformed PGM header") from None
    if width < 1 or height < 1:
        raise ValueError(f"{path}: bad dimensions {width}x{height}")
    if maxval not in (255, 65535):
        raise ValueError(f"{path}: maxval must be 255 or 65535, got {maxval}")

    count = width * height
    if magic == b"P2":
        try:
            values = np.array([int(tok) for tok, _ in tokens], dtype=np.int64)
        except ValueError:
            raise ValueError(f"{path}: non-numeric pixel data") from None
        if values.size != count:
            raise ValueError(f"{path}: expected {count} pixels, got {values.size}")
    else:
        raw = data[end + 1:]  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval == 65535 else np.dtype("u1")
        need = count * dtype.itemsize
        if len(raw) < need:
            raise ValueError(f"{path}: truncated pixel data "
                             f"({len(raw)} bytes, need {need})")
        values = np.frombuffer(raw[:need], dtype=dtype).astype(np.int64)
    if values.min() < 0 or values.max() > maxval:
        raise ValueError(f"{path}: pixel values outside 0..{maxval}")
    return values.reshape(height, width), maxval


def write_pgm(path, values: np.ndarray, maxval: int = 255) -> None:
    """Write a P5 file; float input in [0, 1] is clamped and quantized."""
    if maxval not in (255, 65535):
        raise ValueError(f"maxval must be 255 or 65535, got {maxval}")
    arr = np.asarray(values)
    if np.issubdtype(arr.dtype, np.floating):
        arr = np.rint(np.clip(arr, 0.0, 1.0) * maxval).astype(np.int64)
    height, width = arr.shape
    dtype = np.dtype(">u2") if maxval == 65535 else np.dtype("u1")
    with open(path, "wb") as out:
        out.write(b"P5\n%d %d\n%d\n" % (width, height, maxval))
        out.write(arr.astype(dtype).tobytes())


def load_image(path, spacing: float = 1.0) -> ScalarField:
    """PGM mapped linearly onto [0, 1]."""
    raw, maxval = read_pgm(path)
    return ScalarField(raw.astype(np.float64) / maxval, spacing)


def load_mask(path, spacing: float = 1.0) -> ScalarField:
    """PGM where 0 marks the inpainting domain and anything else is known."""
    raw, _ = read_pgm(path)
    return ScalarField((raw > 0).astype(np.float64), spacing)


def write_f64(path, values: np.ndarray) -> None:
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"f64 dumps are 2-D, got shape {arr.shape}")
    height, width = arr.shape
    with open(path, "wb") as out:
        out.write(F64_MAGIC)
        out.write(struct.pack("<II", width, height))
        out.write(b"\x00" * 4)
        out.write(arr.astype("<f8").tobytes())


def read_f64(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(F64_HEADER)
        if len(header) != F64_HEADER or header[:4] != F64_MAGIC:
            raise ValueError(f"{path}: not a CHUQ f64 dump")
        width, height = struct.unpack("<II", header[4:12])
        data = fh.read()
    need = width * height * 8
    if len(data) < need:
        raise ValueError(f"{path}: truncated f64 data ({len(data)} bytes, need {need})")
    return np.frombuffer(data[:need], dtype="<f8").reshape(height, width).copy()
