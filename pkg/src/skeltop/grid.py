"""Core 3D voxel grid types and neighborhood primitives.

Volumes are dense grids stored x-fastest (C-order arrays indexed [z, y, x]),
so the flat index of voxel (x, y, z) is x + nx*(y + ny*z).  Out-of-bounds
reads are background (0) everywhere.  Voxel spacing is carried along for I/O
but ignored by all topology and metric computations.

Volumes should be treated as immutable once constructed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

CENTER_BIT = 13  # index of the center cell in the packed 27-bit neighborhood


class Voxel(NamedTuple):
    x: int
    y: int
    z: int


def _as_grid(data, dims, dtype):
    nx, ny, nz = dims
    arr = np.ascontiguousarray(data, dtype=dtype)
    if arr.size != nx * ny * nz:
        raise ValueError(f"data size {arr.size} does not match dims {dims}")
    return arr.reshape(nz, ny, nx)


@dataclass(frozen=True)
class BinaryVolume:
    """Dense {0,1} occupancy grid, the universal mask type."""

    data: np.ndarray  # shape (nz, ny, nx), uint8
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        arr = self.data
        if arr.ndim != 3:
            raise ValueError("BinaryVolume expects a 3D grid")
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        if arr.size and arr.max() > 1:
            raise ValueError("BinaryVolume voxels must be 0 or 1")
        object.__setattr__(self, "data", arr)

    @property
    def dims(self) -> tuple[int, int, int]:
        nz, ny, nx = self.data.shape
        return (nx, ny, nz)

    @classmethod
    def from_flat(cls, flat, dims, spacing=(1.0, 1.0, 1.0)):
        return cls(_as_grid(flat, dims, np.uint8), spacing)

    @classmethod
    def empty(cls, dims, spacing=(1.0, 1.0, 1.0)):
        nx, ny, nz = dims
        return cls(np.zeros((nz, ny, nx), dtype=np.uint8), spacing)

    def get(self, p: Voxel) -> int:
        return int(self.data[p.z, p.y, p.x])


@dataclass(frozen=True)
class ScalarVolume:
    """Dense real-valued grid with values in [0, 1]."""

    data: np.ndarray  # shape (nz, ny, nx), float32
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        arr = self.data
        if arr.ndim != 3:
            raise ValueError("ScalarVolume expects a 3D grid")
        arr = np.ascontiguousarray(arr, dtype=np.float32)
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise ValueError("ScalarVolume values must lie in [0, 1]")
        object.__setattr__(self, "data", arr)

    @property
    def dims(self) -> tuple[int, int, int]:
        nz, ny, nx = self.data.shape
        return (nx, ny, nz)

    @classmethod
    def from_binary(cls, vol: BinaryVolume) -> "ScalarVolume":
        return cls(vol.data.astype(np.float32), vol.spacing)


def _check_bounds(p: Voxel, dims):
    nx, ny, nz = dims
    if not (0 <= p.x < nx and 0 <= p.y < ny and 0 <= p.z < nz):
        raise ValueError(f"voxel {p} out of bounds for dims {dims}")


# Neighborhood offsets in ascending (z, y, x) order, center excluded.
_OFFSETS = [
    (dz, dy, dx)
    for dz in (-1, 0, 1)
    for dy in (-1, 0, 1)
    for dx in (-1, 0, 1)
    if (dz, dy, dx) != (0, 0, 0)
]


def _offsets_for(connectivity: int):
    if connectivity == 26:
        return _OFFSETS
    if connectivity == 18:
        return [o for o in _OFFSETS if sum(v != 0 for v in o) <= 2]
    if connectivity == 6:
        return [o for o in _OFFSETS if sum(v != 0 for v in o) == 1]
    raise ValueError(f"connectivity must be 6, 18 or 26, got {connectivity}")


def neighbors(p: Voxel, dims, connectivity: int = 26) -> list[Voxel]:
    """In-bounds neighbors of p, in ascending (z, y, x) offset order."""
    _check_bounds(p, dims)
    nx, ny, nz = dims
    out = []
    for dz, dy, dx in _offsets_for(connectivity):
        x, y, z = p.x + dx, p.y + dy, p.z + dz
        if 0 <= x < nx and 0 <= y < ny and 0 <= z < nz:
            out.append(Voxel(x, y, z))
    return out


def extract_neighborhood27(vol: BinaryVolume, p: Voxel) -> int:
    """Pack the 3x3x3 window centered at p into a 27-bit integer.

    Bit i corresponds to offset (dz, dy, dx) with
    i = (dz+1)*9 + (dy+1)*3 + (dx+1); the center is bit 13.  Out-of-bounds
    cells read as background.
    """
    _check_bounds(p, vol.dims)
    nx, ny, nz = vol.dims
    cfg = 0
    i = 0
    data = vol.data
    for dz in (-1, 0, 1):
        z = p.z + dz
        for dy in (-1, 0, 1):
            y = p.y + dy
            for dx in (-1, 0, 1):
                x = p.x + dx
                if 0 <= x < nx and 0 <= y < ny and 0 <= z < nz and data[z, y, x]:
                    cfg |= 1 << i
                i += 1
    return cfg


def count_foreground(vol: BinaryVolume) -> int:
    return int(vol.data.sum())
