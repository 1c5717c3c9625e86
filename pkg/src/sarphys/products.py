"""Output products: f32 binary tensors with JSON sidecars, PNG composites.

Every artifact the CLI writes is deterministic for identical input, and the
sidecar records provenance (command line, input checksums) so pipelines are
reproducible and auditable.
"""

from __future__ import annotations

import hashlib

import numpy as np
from PIL import Image

from .core import FormatError, read_sidecar, write_sidecar


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def write_tensor(path: str, array: np.ndarray, extra: dict | None = None) -> None:
    """Write a flat little-endian f32 tensor plus a ``<path>.meta`` sidecar."""
    arr = np.ascontiguousarray(array, dtype="<f4")
    meta = {"dtype": "float32", "shape": list(arr.shape), "order": "C"}
    if extra:
        meta.update(extra)
    with open(path, "wb") as f:
        f.write(arr.tobytes(order="C"))
    write_sidecar(path + ".meta", meta)


def read_tensor(path: str) -> tuple:
    """(array, sidecar dict) for a tensor written by write_tensor."""
    meta = read_sidecar(path + ".meta")
    shape = tuple(int(s) for s in meta.get("shape", ()))
    with open(path, "rb") as f:
        payload = f.read()
    expected = int(np.prod(shape)) * 4 if shape else None
    if expected is None or len(payload) != expected:
        raise FormatError(
            f"payload size mismatch in {path}: expected {expected} bytes, got {len(payload)}"
        )
    return np.frombuffer(payload, dtype="<f4").reshape(shape).astype(np.float32), meta


def complex_to_planes(arr: np.ndarray) -> np.ndarray:
    """Stack (real, imag) as a trailing axis for f32 serialization."""
    return np.stack([arr.real, arr.imag], axis=-1)


def planes_to_complex(arr: np.ndarray) -> np.ndarray:
    if arr.shape[-1] != 2:
        raise FormatError("complex tensor must have a trailing (real, imag) axis of size 2")
    return arr[..., 0].astype(np.float64) + 1j * arr[..., 1].astype(np.float64)


def write_png_rgb(path: str, rgb: np.ndarray) -> None:
    """8-bit RGB PNG (no alpha) from float values in [0, 1]."""
    arr = np.clip(np.asarray(rgb, dtype=np.float64), 0.0, 1.0)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise FormatError(f"expected (rows, cols, 3) image, got {arr.shape}")
    data = np.round(arr * 255.0).astype(np.uint8)
    Image.fromarray(data, mode="RGB").save(path, format="PNG")
