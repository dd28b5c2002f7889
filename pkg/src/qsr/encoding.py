"""Image <-> quantum state conversions and the fixed 8x8 -> 4x4 resampler.

Images are plain 2-D float arrays.  Flattening is row-major, so pixel
(r, c) of an 8x8 image maps to basis index 8*r + c.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .statevector import MAX_QUBITS, StateVector


class ZeroImageError(ValueError):
    """Raised when an all-zero image cannot be normalized or encoded."""


def _as_image(img) -> np.ndarray:
    arr = np.asarray(img, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite pixels")
    return arr


def normalize(img) -> np.ndarray:
    """Scale an image to unit Euclidean norm over its pixels."""
    arr = _as_image(img)
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise ZeroImageError("cannot normalize an all-zero image")
    return arr / norm


def amplitude_encode(img) -> StateVector:
    """Encode normalized row-major pixels as the amplitudes of a state."""
    flat = normalize(img).ravel()
    dim = flat.size
    if dim & (dim - 1) or dim < 2:
        raise ValueError(f"image size {dim} is not a power of two >= 2")
    num_qubits = dim.bit_length() - 1
    if num_qubits > MAX_QUBITS:
        raise ValueError(f"image needs {num_qubits} qubits, max is {MAX_QUBITS}")
    return StateVector(num_qubits, flat.astype(complex))


def decode_to_image(state: StateVector, rows: int, cols: int) -> np.ndarray:
    """Per-amplitude magnitudes reshaped to rows x cols (row-major)."""
    if rows * cols != state.dim:
        raise ValueError(
            f"cannot decode {state.dim} amplitudes into a {rows}x{cols} image"
        )
    return np.abs(state.amplitudes).reshape(rows, cols)


def downsample(img) -> np.ndarray:
    """Reduce an 8x8 image to 4x4 by averaging each 2x2 block."""
    arr = _as_image(img)
    if arr.shape != (8, 8):
        raise ValueError(f"downsample expects an 8x8 image, got {arr.shape}")
    if np.any(arr < 0):
        raise ValueError("downsample expects non-negative pixels")
    return arr.reshape(4, 2, 4, 2).mean(axis=(1, 3))


def write_pgm(path, img) -> None:
    """Write an image as ASCII PGM (P2), rescaled to 0..255 by the image max."""
    arr = _as_image(img)
    peak = float(arr.max())
    if peak > 0:
        scaled = np.rint(arr / peak * 255).astype(int)
    else:
        scaled = np.zeros(arr.shape, dtype=int)
    rows, cols = arr.shape
    lines = ["P2", f"{cols} {rows}", "255"]
    lines.extend(" ".join(str(v) for v in row) for row in scaled)
    Path(path).write_text("\n".join(lines) + "\n")


def write_image_csv(path, img) -> None:
    """Write raw image values as CSV, one row per image row."""
    arr = _as_image(img)
    lines = [",".join(f"{v:.17g}" for v in row) for row in arr]
    Path(path).write_text("\n".join(lines) + "\n")


def read_image_csv(path) -> np.ndarray:
    rows = [
        [float(v) for v in line.split(",")]
        for line in Path(path).read_text().splitlines()
        if line.strip()
    ]
    return _as_image(np.array(rows))
