import numpy as np
import pytest

from skeltop.grid import BinaryVolume


def vol_from_coords(coords, dims, spacing=(1.0, 1.0, 1.0)) -> BinaryVolume:
    """Build a BinaryVolume from an iterable of (x, y, z) voxel coordinates."""
    nx, ny, nz = dims
    data = np.zeros((nz, ny, nx), dtype=np.uint8)
    for x, y, z in coords:
        data[z, y, x] = 1
    return BinaryVolume(data, spacing)


def random_binary(rng: np.random.Generator, dims, p=0.5) -> BinaryVolume:
    nx, ny, nz = dims
    return BinaryVolume((rng.random((nz, ny, nx)) < p).astype(np.uint8))


def square_ring(side=4, dims=(8, 8, 3)) -> BinaryVolume:
    """One-voxel-thick square loop in a single z-slice."""
    coords = []
    for i in range(side):
        coords += [(1 + i, 1, 1), (1 + i, side, 1), (1, 1 + i, 1), (side, 1 + i, 1)]
    return vol_from_coords(coords, dims)


def hollow_shell(inner=3, dims=(7, 7, 7)) -> BinaryVolume:
    """Closed cube surface: 5x5x5 solid block minus its 3x3x3 interior."""
    nx, ny, nz = dims
    data = np.zeros((nz, ny, nx), dtype=np.uint8)
    data[1:6, 1:6, 1:6] = 1
    data[2:5, 2:5, 2:5] = 0
    return BinaryVolume(data)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
