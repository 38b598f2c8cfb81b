"""
SQWF1 field snapshots.

Layout: the magic line ``SQWF1``, one JSON metadata line with sorted keys, then the payload of
ny * nx complex values, row-major (rows along y), each stored as little-endian float64 (re, im).
"""
import json
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from sqw.consts import SNAPSHOT_MAGIC
from sqw.physics import ComplexField2D, Grid2D
from sqw.utils.errors import (
    BadMagicError,
    DimensionMismatchError,
    SnapshotMetadataError,
    TruncatedSnapshotError,
    UnsupportedEndiannessError,
)

PAYLOAD_DTYPE = "<c16"
ITEM_BYTES = 16


class SnapshotHeader(BaseModel):
    model_config = ConfigDict(extra="forbid")

    nx: int = Field(gt=0)
    ny: int = Field(gt=0)
    extent_x: float = Field(gt=0)
    extent_y: float = Field(gt=0)
    zeta: float
    A: float
    mode: str | None = None
    normalized: bool = False
    endianness: str = "little"
    dtype: str = "complex128"

    @classmethod
    def from_field(cls, field: ComplexField2D) -> "SnapshotHeader":
        grid = field.grid
        return cls(
            nx=grid.nx,
            ny=grid.ny,
            extent_x=grid.extent_x,
            extent_y=grid.extent_y,
            zeta=float(field.zeta),
            A=float(field.A),
            mode=field.mode,
            normalized=field.normalized,
        )

    @property
    def payload_bytes(self) -> int:
        return ITEM_BYTES * self.nx * self.ny

    def encode(self) -> bytes:
        return json.dumps(self.model_dump(), sort_keys=True, separators=(",", ":")).encode("utf-8")


def write_snapshot(field: ComplexField2D, path: Path | str) -> Path:
    path = Path(path)
    header = SnapshotHeader.from_field(field)
    payload = np.ascontiguousarray(field.values, dtype=PAYLOAD_DTYPE).tobytes()
    with open(path, "wb") as handle:
        handle.write(SNAPSHOT_MAGIC + b"\n")
        handle.write(header.encode() + b"\n")
        handle.write(payload)
    return path


def _split(data: bytes, path: Path) -> tuple[SnapshotHeader, bytes]:
    magic = SNAPSHOT_MAGIC + b"\n"
    if not data.startswith(magic):
        if magic.startswith(data):
            raise TruncatedSnapshotError(f"{path}: file ends inside the magic line")
        raise BadMagicError(f"{path}: not an SQWF1 snapshot")
    end = data.find(b"\n", len(magic))
    if end < 0:
        raise TruncatedSnapshotError(f"{path}: file ends inside the metadata line")
    try:
        raw = json.loads(data[len(magic):end].decode("utf-8"))
        header = SnapshotHeader.model_validate(raw)
    except (UnicodeDecodeError, json.JSONDecodeError, ValidationError) as exc:
        raise SnapshotMetadataError(f"{path}: unreadable metadata: {exc}") from exc
    if header.endianness != "little":
        raise UnsupportedEndiannessError(f"{path}: payload tagged {header.endianness!r}; only little-endian is supported")
    if header.dtype != "complex128":
        raise SnapshotMetadataError(f"{path}: unsupported payload dtype {header.dtype!r}")
    return header, data[end + 1:]


def read_snapshot_header(path: Path | str) -> SnapshotHeader:
    path = Path(path)
    header, _ = _split(path.read_bytes(), path)
    return header


def read_snapshot(path: Path | str, expected_shape: tuple[int, int] | None = None) -> ComplexField2D:
    """Read a snapshot back bit-exactly; ``expected_shape`` is (ny, nx)."""
    path = Path(path)
    header, payload = _split(path.read_bytes(), path)
    if len(payload) < header.payload_bytes:
        raise TruncatedSnapshotError(f"{path}: payload holds {len(payload)} of {header.payload_bytes} bytes")
    if len(payload) > header.payload_bytes:
        raise DimensionMismatchError(
            f"{path}: payload holds {len(payload)} bytes, {header.nx}x{header.ny} needs {header.payload_bytes}"
        )
    if expected_shape is not None and tuple(expected_shape) != (header.ny, header.nx):
        raise DimensionMismatchError(f"{path}: expected {expected_shape}, file holds {(header.ny, header.nx)}")
    try:
        grid = Grid2D(nx=header.nx, ny=header.ny, extent_x=header.extent_x, extent_y=header.extent_y)
    except ValidationError as exc:
        raise SnapshotMetadataError(f"{path}: grid metadata rejected: {exc}") from exc
    values = np.frombuffer(payload, dtype=PAYLOAD_DTYPE).reshape(header.ny, header.nx)
    return ComplexField2D(
        grid=grid,
        values=values.astype(np.complex128),
        zeta=header.zeta,
        A=header.A,
        normalized=header.normalized,
        mode=header.mode,
    )


__all__ = ["SnapshotHeader", "write_snapshot", "read_snapshot", "read_snapshot_header"]
