"""Soft morphology: min/max-filter erosion, dilation, opening and the
iterative soft-skeleton residual scheme.

The structuring element is the 7-cell cross (center + 6-neighbors); a min
over the cross equals the min of three axis-wise 3-window minima, so the
filters run as three 1D passes.  Out-of-bounds cells contribute 0 for both
erosion and dilation, consistent with the zero-padding convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import ScalarVolume


@dataclass(frozen=True)
class SoftSkeletonConfig:
    iterations: int = 10

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def _shifted_views(padded, shape):
    nz, ny, nx = shape
    yield padded[1:nz + 1, 1:ny + 1, 1:nx + 1]
    yield padded[0:nz, 1:ny + 1, 1:nx + 1]
    yield padded[2:nz + 2, 1:ny + 1, 1:nx + 1]
    yield padded[1:nz + 1, 0:ny, 1:nx + 1]
    yield padded[1:nz + 1, 2:ny + 2, 1:nx + 1]
    yield padded[1:nz + 1, 1:ny + 1, 0:nx]
    yield padded[1:nz + 1, 1:ny + 1, 2:nx + 2]


def _soft_erode(data: np.ndarray) -> np.ndarray:
    padded = np.pad(data, 1)  # zero pad: out-of-bounds reads as 0
    views = _shifted_views(padded, data.shape)
    out = next(views).copy()
    for v in views:
        np.minimum(out, v, out=out)
    return out


def _soft_dilate(data: np.ndarray) -> np.ndarray:
    padded = np.pad(data, 1)
    views = _shifted_views(padded, data.shape)
    out = next(views).copy()
    for v in views:
        np.maximum(out, v, out=out)
    return out


def soft_erode(f: ScalarVolume) -> ScalarVolume:
    """Minimum over the 7-cell cross at each voxel."""
    return ScalarVolume(_soft_erode(f.data), f.spacing)


def soft_dilate(f: ScalarVolume) -> ScalarVolume:
    """Maximum over the 7-cell cross at each voxel."""
    return ScalarVolume(_soft_dilate(f.data), f.spacing)


def soft_open(f: ScalarVolume) -> ScalarVolume:
    return ScalarVolume(_soft_dilate(_soft_erode(f.data)), f.spacing)


def soft_skeleton(f: ScalarVolume, cfg: SoftSkeletonConfig | None = None) -> ScalarVolume:
    """Iterative residual soft skeleton.

    skel = pos(f - open(f)); then for each of the k rounds:
    f <- erode(f); delta = pos(f - open(f)); skel <- skel + pos(delta - skel*delta).
    """
    cfg = cfg or SoftSkeletonConfig()
    data = f.data
    eroded = _soft_erode(data)
    skel = np.clip(data - _soft_dilate(eroded), 0.0, None)
    for _ in range(cfg.iterations):
        data = eroded
        if not data.any():
            break  # fully eroded: every remaining residual is zero
        eroded = _soft_erode(data)
        delta = np.clip(data - _soft_dilate(eroded), 0.0, None)
        skel = skel + np.clip(delta - skel * delta, 0.0, None)
    return ScalarVolume(np.clip(skel, 0.0, 1.0), f.spacing)
