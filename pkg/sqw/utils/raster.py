"""
Binary PGM heatmaps: density as 16-bit (linear in [0, max]), phase as 8-bit ([-pi, pi] -> [0, 255]).
The first raster row is the largest y~.
"""
import math
from pathlib import Path

import numpy as np

from sqw.physics import ComplexField2D
from sqw.utils.configs.modes import HeatmapKind
from sqw.utils.errors import NumericalGuardError


def _encode(pixels: np.ndarray, maxval: int) -> bytes:
    height, width = pixels.shape
    header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
    dtype = ">u2" if maxval > 255 else "u1"
    return header + np.ascontiguousarray(pixels, dtype=dtype).tobytes()


def heatmap_pixels(field: ComplexField2D, kind: HeatmapKind | str) -> tuple[np.ndarray, int]:
    kind = HeatmapKind(kind)
    values = field.values
    if not np.all(np.isfinite(values)):
        raise NumericalGuardError("cannot render a field with non-finite values")
    if kind == HeatmapKind.density:
        rho = np.abs(values) ** 2
        peak = rho.max()
        scaled = rho / peak if peak > 0 else np.zeros_like(rho)
        pixels, maxval = np.rint(scaled * 65535.0).astype(np.uint16), 65535
    else:
        phase = np.angle(values)
        pixels, maxval = np.rint((phase + math.pi) / (2.0 * math.pi) * 255.0).astype(np.uint8), 255
    return np.flipud(pixels), maxval


def render_heatmap(field: ComplexField2D, kind: HeatmapKind | str, path: Path | str) -> Path:
    path = Path(path)
    pixels, maxval = heatmap_pixels(field, kind)
    path.write_bytes(_encode(pixels, maxval))
    return path


def read_pgm(path: Path | str) -> tuple[np.ndarray, int]:
    """Pixels (top row first) and maxval of a binary PGM written by render_heatmap."""
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if len(parts) < 4 or parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    width, height = (int(v) for v in parts[1].split())
    maxval = int(parts[2])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(parts[3], dtype=dtype).reshape(height, width), maxval


__all__ = ["heatmap_pixels", "render_heatmap", "read_pgm"]
