"""Topology-preserving sequential thinning by simple-point deletion.

Each pass sweeps the six face directions in the fixed order U, D, N, S, E, W
(+z, -z, -y, +y, +x, -x).  Within a subpass the border voxels for that
direction are collected, batch-classified on a snapshot, then deleted one at
a time in ascending (z, y, x) order; any candidate whose 26-neighborhood was
touched by an earlier deletion in the same subpass is re-evaluated on the
current volume, so only points that are simple at deletion time are removed.
This guarantees Betti-number preservation without parallel-deletion theory.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .grid import BinaryVolume, CENTER_BIT
from . import simple_points as sp

# Direction order U, D, N, S, E, W as (dz, dy, dx).
DIRECTIONS = [(1, 0, 0), (-1, 0, 0), (0, -1, 0), (0, 1, 0), (0, 0, 1), (0, 0, -1)]

VARIANTS = ("euler", "boolean")


@dataclass(frozen=True)
class ThinningMethod:
    variant: str = "euler"
    preserve_endpoints: bool = True

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")


def _padded_offsets27(py, px):
    # Flat offsets in a padded (z, y, x) array for config bit order.
    out = []
    for dz in (-1, 0, 1):
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                out.append(dz * py * px + dy * px + dx)
    return out


def skeletonize(vol: BinaryVolume, method: ThinningMethod | None = None,
                threads: int = 1) -> BinaryVolume:
    """Thin `vol` to a centerline skeleton with identical Betti numbers.

    `threads` > 1 parallelizes the batch candidate classification only; the
    deletion order is fixed, so the result is identical for any thread count.
    """
    method = method or ThinningMethod()
    nx, ny, nz = vol.dims
    pz, py, px = nz + 2, ny + 2, nx + 2

    buf = bytearray(pz * py * px)
    arr = np.frombuffer(buf, dtype=np.uint8).reshape(pz, py, px)
    arr[1:-1, 1:-1, 1:-1] = vol.data

    dirty = bytearray(len(buf))
    darr = np.frombuffer(dirty, dtype=np.uint8).reshape(pz, py, px)

    off27 = _padded_offsets27(py, px)
    off27_np = np.asarray(off27, dtype=np.intp)
    off27_nonzero = [o for o in off27 if o != 0]

    if method.variant == "euler":
        batch_test, scalar_test = sp.is_simple_euler_batch, sp.is_simple_euler
    else:
        batch_test, scalar_test = sp.is_simple_boolean_batch, sp.is_simple_boolean

    preserve = method.preserve_endpoints
    flat = arr.ravel()
    changed = True
    while changed:
        changed = False
        for dz, dy, dx in DIRECTIONS:
            core = arr[1:-1, 1:-1, 1:-1]
            nbr = arr[1 + dz:pz - 1 + dz, 1 + dy:py - 1 + dy, 1 + dx:px - 1 + dx]
            cand = np.zeros_like(arr, dtype=bool)
            cand[1:-1, 1:-1, 1:-1] = (core == 1) & (nbr == 0)
            idxs = np.flatnonzero(cand)
            if idxs.size == 0:
                continue

            bits = flat[idxs[:, None] + off27_np]
            if threads > 1 and idxs.size > 4096:
                chunks = np.array_split(bits, threads)
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    simple = np.concatenate(list(pool.map(batch_test, chunks)))
            else:
                simple = batch_test(bits)
            deletable = simple
            if preserve:
                deletable = deletable & (bits.sum(axis=1) - 1 > 1)

            darr[:] = 0
            verdicts = deletable.tolist()
            for k, fi in enumerate(idxs.tolist()):
                if dirty[fi]:
                    cfg = 0
                    for i, off in enumerate(off27):
                        if buf[fi + off]:
                            cfg |= 1 << i
                    if preserve and (cfg & sp.NONCENTER_MASK).bit_count() <= 1:
                        continue
                    if not scalar_test(cfg):
                        continue
                elif not verdicts[k]:
                    continue
                buf[fi] = 0
                for off in off27_nonzero:
                    dirty[fi + off] = 1
                changed = True

    return BinaryVolume(arr[1:-1, 1:-1, 1:-1].copy(), vol.spacing)
